/** Scripted browser session: load the flashlight model, press the button,
 * and watch the lab learn that the battery is empty — exactly what the
 * recorded /step fixture says. */

// @vitest-environment happy-dom

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { LabApi } from "../src/api.js";
import { createLab, type LabApp } from "../src/main.js";
import {
  loadFixtureJson,
  startFixtureServer,
  type FixtureServer,
} from "./fixture_server.js";

let server: FixtureServer;
let app: LabApp;
let root: HTMLElement;

function click(id: string): void {
  const el = root.querySelector<HTMLElement>(`#${id}`);
  if (!el) throw new Error(`no element #${id}`);
  el.click();
}

async function settle(): Promise<void> {
  // every handler awaits a single fetch against a local fixture server
  await new Promise((resolve) => setTimeout(resolve, 150));
}

beforeAll(async () => {
  server = await startFixtureServer();
  document.body.innerHTML = '<main id="lab-root"></main>';
  root = document.getElementById("lab-root") as HTMLElement;
  app = createLab(root, new LabApi(server.base));
});

afterAll(async () => {
  await server.close();
});

describe("flashlight lab session", () => {
  it("starts with a placeholder until a model is loaded", () => {
    expect(root.querySelector("#placeholder")).not.toBeNull();
  });

  it("loads the flashlight model", async () => {
    await app.loadModelDocument(loadFixtureJson("flashlight_obs"));
    expect(root.querySelectorAll("#team-table tbody tr")).toHaveLength(2);
    expect(root.querySelector("#mode")?.textContent).toBe("mode: obs");
  });

  it("battery state is unknown before the experiment", async () => {
    const input = root.querySelector<HTMLInputElement>("#query-input")!;
    input.value = "K B=0";
    click("query");
    await settle();
    expect(root.querySelector("#truth-badge")?.textContent).toBe("false");
  });

  it("pressing the button shrinks the team and reveals the battery", async () => {
    const picker = root.querySelector<HTMLSelectElement>('select[data-picker="P"]')!;
    picker.value = "1";
    click("intervene");
    await settle();

    const fixture = loadFixtureJson("step_p1");
    const rows = root.querySelectorAll("#team-table tbody tr");
    expect(rows).toHaveLength(fixture.team.length);
    expect(rows).toHaveLength(1);

    const known = root.querySelector('#known-values li[data-var="B"]');
    expect(known?.getAttribute("data-value")).toBe("0");
    expect(known?.textContent).toBe("B = 0");
    expect(known?.getAttribute("data-value")).toBe(fixture.known_values.B);

    // the intervened variable is badged
    expect(root.querySelector(".badge.intervened")).not.toBeNull();
  });

  it("the query badge now matches the recorded answer", async () => {
    const input = root.querySelector<HTMLInputElement>("#query-input")!;
    input.value = "K B=0";
    click("query");
    await settle();
    const fixture = loadFixtureJson("eval_kb0_after");
    expect(root.querySelector("#truth-badge")?.textContent).toBe(String(fixture.result));
    expect(root.querySelector("#truth-badge")?.textContent).toBe("true");
  });

  it("undo restores the two-row panel", async () => {
    click("undo");
    await settle();
    expect(root.querySelectorAll("#team-table tbody tr")).toHaveLength(2);
  });

  it("empty assignment needs the advanced toggle and changes nothing", async () => {
    click("intervene");
    await settle();
    expect(root.querySelector("#notice")?.textContent).toContain("pick at least one");
    expect(root.querySelectorAll("#team-table tbody tr")).toHaveLength(2);

    const toggle = root.querySelector<HTMLInputElement>("#allow-empty")!;
    toggle.checked = true;
    click("intervene");
    await settle();
    expect(root.querySelectorAll("#team-table tbody tr")).toHaveLength(2);
  });

  it("malformed formulas surface the server's caret position inline", async () => {
    const input = root.querySelector<HTMLInputElement>("#query-input")!;
    input.value = "[P=";
    click("query");
    await settle();
    expect(root.querySelector("#notice")?.textContent).toContain("position");
  });

  it("never spoke to anything but recorded endpoints", () => {
    expect(server.unmatched).toEqual([]);
  });
});
