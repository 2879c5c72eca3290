/** DOM shell: wires the bundle, the view state and the renderers together.
 *
 * One `render` pass redraws everything from the current ViewState, so any
 * control change (window, selection, tab, seek) updates all views at once.
 */

import {
  Bundle,
  BundleError,
  distanceTotalsInWindow,
  eventsInWindow,
  loadBundle,
  loadMedia,
  rowsInWindow,
  stepDistancesInWindow,
} from "./bundle.js";
import {
  cdfChart,
  densityChart,
  distanceChart,
  pdfChart,
  trackColor,
  trajectoryChart,
  violinChart,
} from "./charts.js";
import { cdfPoints, histogramPdf, kde2dGrid, violinStats } from "./stats.js";
import { TABLE_COLUMNS, TableColumn, buildRows, sortRows } from "./table.js";
import {
  ViewState,
  initialState,
  play,
  seek,
  setSpeed,
  setTab,
  setWindow,
  stop,
  tick,
  toggleTrack,
} from "./viewState.js";

export interface App {
  state: ViewState;
  bundle: Bundle;
  /** Re-render everything from the current state (exposed for tests). */
  render(): void;
  dispatch(update: (state: ViewState) => ViewState): void;
}

const TABS: [string, string][] = [
  ["graphs", "Graphs"],
  ["video", "Video"],
  ["animation", "Animation"],
  ["table", "Table"],
];

export function mountApp(
  root: HTMLElement,
  bundle: Bundle,
  mediaUrl: string | null = null,
): App {
  const doc = root.ownerDocument;
  let state = initialState(bundle);
  let sortColumn: TableColumn = "second";
  let sortAscending = true;
  let animTimer: ReturnType<typeof setInterval> | null = null;

  root.innerHTML = `
    <div class="controls">
      <span class="track-toggles"></span>
      <label>window <input class="t0" type="number" step="1"> -
        <input class="t1" type="number" step="1"> s</label>
      <nav class="tabs"></nav>
    </div>
    <div class="view"></div>
    <div class="status"></div>
  `;

  const toggles = root.querySelector(".track-toggles") as HTMLElement;
  for (const id of bundle.tracks) {
    const label = doc.createElement("label");
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.className = "track-toggle";
    box.dataset.track = String(id);
    box.addEventListener("change", () => dispatch((s) => toggleTrack(s, bundle, id)));
    label.appendChild(box);
    label.append(` track ${id}`);
    label.style.color = trackColor(id);
    toggles.appendChild(label);
  }

  const t0Input = root.querySelector(".t0") as HTMLInputElement;
  const t1Input = root.querySelector(".t1") as HTMLInputElement;
  const applyWindow = () =>
    dispatch((s) => setWindow(s, bundle, Number(t0Input.value), Number(t1Input.value)));
  t0Input.addEventListener("change", applyWindow);
  t1Input.addEventListener("change", applyWindow);

  const tabsNav = root.querySelector(".tabs") as HTMLElement;
  for (const [key, title] of TABS) {
    const btn = doc.createElement("button");
    btn.textContent = title;
    btn.className = `tab-${key}`;
    btn.addEventListener("click", () => dispatch((s) => setTab(s, key as ViewState["tab"])));
    tabsNav.appendChild(btn);
  }

  const view = root.querySelector(".view") as HTMLElement;

  function dispatch(update: (s: ViewState) => ViewState): void {
    state = update(state);
    app.state = state;
    render();
  }

  function wireDataPoints(container: HTMLElement): void {
    for (const dot of container.querySelectorAll<SVGElement>(".data-point")) {
      dot.addEventListener("click", () =>
        dispatch((s) => seek(s, bundle, Number(dot.dataset.second))),
      );
    }
  }

  function renderGraphs(): void {
    const sel = state.selected;
    const window: [number, number] = [state.t0, state.t1];
    const events = eventsInWindow(bundle, state.t0, state.t1, sel);
    view.appendChild(distanceChart(doc, bundle, sel, window, events));
    view.appendChild(trajectoryChart(doc, bundle, sel, window));
    const steps = [...stepDistancesInWindow(bundle, state.t0, state.t1, sel).values()].flat();
    view.appendChild(pdfChart(doc, histogramPdf(steps, 12)));
    view.appendChild(cdfChart(doc, cdfPoints(steps)));
    const violin = violinStats(steps);
    if (violin) view.appendChild(violinChart(doc, violin));
    const points = rowsInWindow(bundle, state.t0, state.t1, sel).map(
      (r) => [r[2], r[3]] as [number, number],
    );
    view.appendChild(
      densityChart(doc, kde2dGrid(points, bundle.meta.width, bundle.meta.height)),
    );

    const totals = distanceTotalsInWindow(bundle, state.t0, state.t1, sel);
    const list = doc.createElement("ul");
    list.className = "distance-totals";
    for (const [id, total] of [...totals.entries()].sort((a, b) => a[0] - b[0])) {
      const item = doc.createElement("li");
      item.className = "distance-total";
      item.dataset.track = String(id);
      item.dataset.total = total.toFixed(1);
      item.textContent = `track ${id}: ${total.toFixed(1)} px`;
      list.appendChild(item);
    }
    view.appendChild(list);
    const eventNote = doc.createElement("p");
    eventNote.className = "event-count";
    eventNote.dataset.count = String(events.length);
    eventNote.textContent = `${events.length} behavior event(s) in window`;
    view.appendChild(eventNote);
    wireDataPoints(view);
  }

  function renderAnimation(): void {
    const wrap = doc.createElement("div");
    wrap.className = "animation";
    const svg = trajectoryChart(doc, bundle, state.selected, [state.t0, state.cursor]);
    svg.setAttribute("class", "animation-frame");
    wrap.appendChild(svg);
    const cursor = doc.createElement("p");
    cursor.className = "cursor-readout";
    cursor.dataset.second = state.cursor.toFixed(2);
    cursor.textContent = `t = ${state.cursor.toFixed(2)} s`;
    wrap.appendChild(cursor);
    const playBtn = doc.createElement("button");
    playBtn.className = "play";
    playBtn.textContent = "play";
    playBtn.addEventListener("click", () => {
      dispatch(play);
      if (animTimer === null) {
        animTimer = setInterval(() => {
          dispatch((s) => tick(s, 0.1));
          if (!state.playing && animTimer !== null) {
            clearInterval(animTimer);
            animTimer = null;
          }
        }, 100);
      }
    });
    const stopBtn = doc.createElement("button");
    stopBtn.className = "stop";
    stopBtn.textContent = "stop";
    stopBtn.addEventListener("click", () => {
      if (animTimer !== null) {
        clearInterval(animTimer);
        animTimer = null;
      }
      dispatch(stop);
    });
    wrap.appendChild(playBtn);
    wrap.appendChild(stopBtn);
    view.appendChild(wrap);
  }

  function renderTable(): void {
    const rows = sortRows(
      buildRows(
        rowsInWindow(bundle, state.t0, state.t1, state.selected),
        bundle.distanceSeries,
      ),
      sortColumn,
      sortAscending,
    );
    const table = doc.createElement("table");
    table.className = "per-second";
    const head = doc.createElement("tr");
    for (const col of TABLE_COLUMNS) {
      const th = doc.createElement("th");
      th.textContent = col + (sortColumn === col ? (sortAscending ? " ^" : " v") : "");
      th.dataset.column = col;
      th.addEventListener("click", () => {
        if (sortColumn === col) {
          sortAscending = !sortAscending;
        } else {
          sortColumn = col;
          sortAscending = true;
        }
        render();
      });
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = doc.createElement("tr");
      tr.className = "data-row";
      if (Math.abs(row.second - state.cursor) < 0.5) tr.classList.add("highlight");
      for (const col of TABLE_COLUMNS) {
        const td = doc.createElement("td");
        const v = row[col];
        td.textContent = Number.isInteger(v) ? String(v) : v.toFixed(1);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    view.appendChild(table);
  }

  function renderVideo(): void {
    if (!mediaUrl) {
      const note = doc.createElement("p");
      note.className = "no-video";
      note.textContent = "no video configured for this bundle";
      view.appendChild(note);
      return;
    }
    const wrap = doc.createElement("div");
    wrap.className = "video-panel";
    const video = doc.createElement("video");
    video.src = mediaUrl;
    video.controls = true;
    wrap.appendChild(video);
    const speed = doc.createElement("select");
    speed.className = "speed";
    for (const rate of [0.25, 0.5, 1, 2, 4]) {
      const opt = doc.createElement("option");
      opt.value = String(rate);
      opt.textContent = `${rate}x`;
      if (rate === state.speed) opt.selected = true;
      speed.appendChild(opt);
    }
    speed.addEventListener("change", () => {
      dispatch((s) => setSpeed(s, Number(speed.value)));
      video.playbackRate = Number(speed.value);
    });
    wrap.appendChild(speed);
    const quarters: [string, number][] = [
      ["1/4", 0.25], ["1/2", 0.5], ["3/4", 0.75], ["end", 1.0],
    ];
    for (const [label, frac] of quarters) {
      const btn = doc.createElement("button");
      btn.className = "seek-quarter";
      btn.textContent = label;
      btn.addEventListener("click", () => {
        const t = frac * bundle.meta.clip_seconds;
        video.currentTime = t;
        dispatch((s) => seek(s, bundle, t));
      });
      wrap.appendChild(btn);
    }
    view.appendChild(wrap);
  }

  function render(): void {
    t0Input.value = String(state.t0);
    t1Input.value = String(state.t1);
    for (const box of root.querySelectorAll<HTMLInputElement>(".track-toggle")) {
      box.checked = state.selected.has(Number(box.dataset.track));
    }
    for (const [key] of TABS) {
      const btn = root.querySelector(`.tab-${key}`) as HTMLButtonElement;
      btn.disabled = state.tab === key;
    }
    view.innerHTML = "";
    switch (state.tab) {
      case "graphs":
        renderGraphs();
        break;
      case "animation":
        renderAnimation();
        break;
      case "table":
        renderTable();
        break;
      case "video":
        renderVideo();
        break;
    }
    const status = root.querySelector(".status") as HTMLElement;
    status.textContent =
      `${bundle.tracks.length} tracks, window ${state.t0.toFixed(1)}-` +
      `${state.t1.toFixed(1)} s, cursor ${state.cursor.toFixed(2)} s`;
  }

  const app: App = { state, bundle, render, dispatch };
  render();
  return app;
}

/** Entry point for the served page. */
export async function boot(root: HTMLElement): Promise<App> {
  root.textContent = "loading bundle...";
  try {
    const bundle = await loadBundle("bundle.json");
    const media = await loadMedia("media.json");
    root.textContent = "";
    return mountApp(root, bundle, media);
  } catch (err) {
    const message = err instanceof BundleError ? err.message : `load failed: ${String(err)}`;
    root.innerHTML = "";
    const banner = root.ownerDocument.createElement("div");
    banner.className = "error-banner";
    banner.textContent = message;
    root.appendChild(banner);
    throw err;
  }
}
