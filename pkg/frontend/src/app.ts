/** Wires the workbench together: sheet navigation, the trend dialog, the
 * progress dashboard, and a compile button, all against the same-origin
 * elicit service. */

import { ApiClient } from "./api.js";
import { ProgressView } from "./progress_view.js";
import { describeError, SheetView } from "./sheet_view.js";
import { TrendDialog } from "./trend_dialog.js";
import { PlanDoc, ScaleDoc } from "./types.js";

async function install(root: HTMLElement): Promise<void> {
  const api = new ApiClient();
  let scale: ScaleDoc;
  let plan: PlanDoc;
  try {
    scale = await api.scale();
    plan = await api.plan();
  } catch (error) {
    root.textContent = `cannot reach the elicit service: ${String(error)}`;
    return;
  }

  const status = document.createElement("p");
  status.id = "status";
  const say = (message: string) => {
    status.textContent = message;
  };

  const sheetView = new SheetView(document, { api, scale, onStatus: say });
  const trendDialog = new TrendDialog(document, {
    api,
    plan,
    onStatus: say,
    onApplied: () => {
      say("trend stored");
      void showSheet(currentSheet);
      void refreshProgress();
    },
  });
  const progressView = new ProgressView(document);

  let currentSheet = 0;
  const sheetLabel = document.createElement("span");
  sheetLabel.id = "sheet-label";

  async function showSheet(index: number): Promise<void> {
    currentSheet = Math.max(0, Math.min(index, plan.sheets.length - 1));
    sheetLabel.textContent = `sheet ${currentSheet + 1} of ` +
      `${plan.sheets.length}`;
    try {
      const sheet = await api.sheet(currentSheet);
      await sheetView.render(sheet);
    } catch (error) {
      say(describeError(error));
    }
  }

  async function refreshProgress(): Promise<void> {
    try {
      progressView.render(await api.progress());
    } catch (error) {
      say(describeError(error));
    }
  }

  const nav = document.createElement("div");
  nav.id = "sheet-nav";
  const previous = document.createElement("button");
  previous.type = "button";
  previous.textContent = "Previous sheet";
  previous.onclick = () => {
    void showSheet(currentSheet - 1).then(refreshProgress);
  };
  const next = document.createElement("button");
  next.type = "button";
  next.textContent = "Next sheet";
  next.onclick = () => {
    void showSheet(currentSheet + 1).then(refreshProgress);
  };
  nav.appendChild(previous);
  nav.appendChild(sheetLabel);
  nav.appendChild(next);

  const compileButton = document.createElement("button");
  compileButton.type = "button";
  compileButton.id = "compile";
  compileButton.textContent = "Compile conditional tables";
  compileButton.onclick = async () => {
    try {
      const doc = await api.compile();
      say(`compiled ${doc.tables.length} tables`);
    } catch (error) {
      say(describeError(error));
    }
  };

  root.appendChild(status);
  root.appendChild(nav);
  root.appendChild(sheetView.element);
  root.appendChild(trendDialog.element);
  root.appendChild(progressView.element);
  root.appendChild(compileButton);

  await showSheet(0);
  await refreshProgress();
}

const root = document.querySelector<HTMLElement>("#app");
if (root !== null) {
  void install(root);
}
