/** Live progress: one bar for the whole session plus a per-variable table
 * of assessed counts and complete distributions. */

import { ProgressDoc } from "./types.js";

export class ProgressView {
  readonly element: HTMLDivElement;
  private readonly doc: Document;

  constructor(doc: Document) {
    this.doc = doc;
    this.element = doc.createElement("div");
    this.element.className = "progress-view";
  }

  render(progress: ProgressDoc): void {
    this.element.textContent = "";

    const heading = this.doc.createElement("h2");
    heading.textContent = "Progress";
    this.element.appendChild(heading);

    const summary = this.doc.createElement("p");
    summary.className = "progress-summary";
    const percent = progress.total
      ? Math.round((progress.assessed / progress.total) * 100)
      : 0;
    summary.textContent =
      `${progress.assessed} of ${progress.total} probabilities assessed ` +
      `(${percent}%)`;
    this.element.appendChild(summary);

    const bar = this.doc.createElement("div");
    bar.className = "progress-bar";
    const fill = this.doc.createElement("div");
    fill.className = "progress-fill";
    fill.style.width = `${percent}%`;
    bar.appendChild(fill);
    this.element.appendChild(bar);

    const table = this.doc.createElement("table");
    table.className = "progress-table";
    const head = this.doc.createElement("tr");
    for (const title of ["Variable", "Assessed", "Complete rows"]) {
      const cell = this.doc.createElement("th");
      cell.textContent = title;
      head.appendChild(cell);
    }
    table.appendChild(head);
    for (const [name, entry] of Object.entries(progress.per_variable)) {
      const row = this.doc.createElement("tr");
      const nameCell = this.doc.createElement("td");
      nameCell.textContent = name;
      row.appendChild(nameCell);
      const assessedCell = this.doc.createElement("td");
      assessedCell.textContent = `${entry.assessed} / ${entry.total}`;
      row.appendChild(assessedCell);
      const completeCell = this.doc.createElement("td");
      completeCell.textContent =
        `${entry.complete_distributions} / ${entry.distributions}`;
      row.appendChild(completeCell);
      table.appendChild(row);
    }
    this.element.appendChild(table);
  }
}
