/** UI consistency: what the DOM shows equals values recomputed straight
 * from the bundle JSON, and every view answers to the one ViewState.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { mountApp } from "../src/app.js";
import { fixtureBundle, fixtureDoc } from "./fixture.js";

type Doc = {
  per_second: [number, number, number, number, number, number][];
  distance_series: Record<string, [number, number][]>;
  events: { track_id: number; kind: string; start: number; end: number }[];
  meta: { fps: number; clip_seconds: number };
};

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<div id='app'></div>";
  root = document.getElementById("app") as HTMLElement;
});

describe("consistency with the raw bundle JSON", () => {
  it("table row count matches an independent recount", () => {
    const app = mountApp(root, fixtureBundle());
    app.dispatch((s) => ({ ...s, tab: "table" }));
    const raw = fixtureDoc() as Doc;
    const rows = root.querySelectorAll("tr.data-row");
    expect(rows.length).toBe(raw.per_second.length);
  });

  it("distance totals match the cumulative series endpoints", () => {
    mountApp(root, fixtureBundle());
    const raw = fixtureDoc() as Doc;
    for (const item of root.querySelectorAll<HTMLElement>(".distance-total")) {
      const id = item.dataset.track!;
      const series = raw.distance_series[id];
      const expected = series[series.length - 1][1];
      expect(Number(item.dataset.total)).toBeCloseTo(expected, 1);
    }
  });

  it("event count matches the bundle's event list", () => {
    mountApp(root, fixtureBundle());
    const raw = fixtureDoc() as Doc;
    const note = root.querySelector<HTMLElement>(".event-count")!;
    expect(Number(note.dataset.count)).toBe(raw.events.length);
  });

  it("mounting the same bundle twice renders identical views", () => {
    mountApp(root, fixtureBundle());
    const first = root.innerHTML;
    document.body.innerHTML = "<div id='app'></div>";
    const again = document.getElementById("app") as HTMLElement;
    mountApp(again, fixtureBundle());
    expect(again.innerHTML).toBe(first);
  });
});

describe("single source of truth", () => {
  it("changing the time window updates charts, totals and table together", () => {
    const bundle = fixtureBundle();
    const app = mountApp(root, bundle);
    const pointsBefore = root.querySelectorAll(".data-point").length;
    const totalBefore = Number(
      root.querySelector<HTMLElement>(".distance-total[data-track='1']")!.dataset.total,
    );

    const t0 = root.querySelector(".t0") as HTMLInputElement;
    const t1 = root.querySelector(".t1") as HTMLInputElement;
    t0.value = "5";
    t1.value = "10";
    t1.dispatchEvent(new Event("change"));

    expect(app.state.t0).toBe(5);
    expect(app.state.t1).toBe(10);
    const pointsAfter = root.querySelectorAll(".data-point").length;
    expect(pointsAfter).toBeLessThan(pointsBefore);
    const totalAfter = Number(
      root.querySelector<HTMLElement>(".distance-total[data-track='1']")!.dataset.total,
    );
    expect(totalAfter).toBeLessThan(totalBefore);

    app.dispatch((s) => ({ ...s, tab: "table" }));
    const raw = fixtureDoc() as Doc;
    const expectRows = raw.per_second.filter(([s]) => s >= 5 && s <= 10).length;
    expect(root.querySelectorAll("tr.data-row").length).toBe(expectRows);
  });

  it("deselecting a track removes it from every view", () => {
    const app = mountApp(root, fixtureBundle());
    const box = root.querySelector<HTMLInputElement>(".track-toggle[data-track='2']")!;
    box.click();
    expect(app.state.selected.has(2)).toBe(false);
    expect(root.querySelector(".distance-total[data-track='2']")).toBeNull();
    app.dispatch((s) => ({ ...s, tab: "table" }));
    const raw = fixtureDoc() as Doc;
    const expectRows = raw.per_second.filter(([, id]) => id !== 2).length;
    expect(root.querySelectorAll("tr.data-row").length).toBe(expectRows);
  });

  it("clicking a data point moves the playback cursor to that second", () => {
    const app = mountApp(root, fixtureBundle());
    const dots = root.querySelectorAll<SVGElement>(".data-point");
    const target = dots[Math.floor(dots.length / 2)];
    const second = Number(target.dataset.second);
    target.dispatchEvent(new Event("click"));
    expect(app.state.cursor).toBe(second);
    app.dispatch((s) => ({ ...s, tab: "animation" }));
    const readout = root.querySelector<HTMLElement>(".cursor-readout")!;
    expect(Number(readout.dataset.second)).toBeCloseTo(second, 2);
  });
});

describe("tabs", () => {
  it("table headers sort ascending then descending on click", () => {
    const app = mountApp(root, fixtureBundle());
    app.dispatch((s) => ({ ...s, tab: "table" }));
    const header = root.querySelector<HTMLElement>("th[data-column='distance']")!;
    header.dispatchEvent(new Event("click"));
    const read = () =>
      [...root.querySelectorAll("tr.data-row")].map((tr) =>
        Number((tr.children[4] as HTMLElement).textContent),
      );
    const asc = read();
    expect(asc).toEqual([...asc].sort((a, b) => a - b));
    root
      .querySelector<HTMLElement>("th[data-column='distance']")!
      .dispatchEvent(new Event("click"));
    const desc = read();
    expect(desc).toEqual([...desc].sort((a, b) => b - a));
  });

  it("video tab shows a panel only when media is configured", () => {
    const app = mountApp(root, fixtureBundle(), null);
    app.dispatch((s) => ({ ...s, tab: "video" }));
    expect(root.querySelector(".no-video")).not.toBeNull();

    document.body.innerHTML = "<div id='app'></div>";
    const withVideo = mountApp(
      document.getElementById("app") as HTMLElement,
      fixtureBundle(),
      "clip.mp4",
    );
    withVideo.dispatch((s) => ({ ...s, tab: "video" }));
    const panel = document.querySelector(".video-panel")!;
    expect(panel.querySelector("video")).not.toBeNull();
    expect(panel.querySelectorAll(".seek-quarter").length).toBe(4);
  });

  it("animation play and stop drive the playing flag", () => {
    const app = mountApp(root, fixtureBundle());
    app.dispatch((s) => ({ ...s, tab: "animation" }));
    root.querySelector<HTMLElement>("button.play")!.dispatchEvent(new Event("click"));
    expect(app.state.playing).toBe(true);
    root.querySelector<HTMLElement>("button.stop")!.dispatchEvent(new Event("click"));
    expect(app.state.playing).toBe(false);
  });
});
