/** Dialog for deriving one conditional distribution from another: pick the
 * source and target rows of a variable, a shift fraction, and a direction,
 * preview the derived values the server computes, then store them. */

import { ApiClient, ApiError } from "./api.js";
import { describeError } from "./sheet_view.js";
import {
  DistributionRef,
  PlanDoc,
  TrendDirection,
  TrendRequest,
} from "./types.js";

export interface TrendDialogOptions {
  api: ApiClient;
  plan: PlanDoc;
  onApplied?: () => void;
  onStatus?: (message: string) => void;
}

function parentsLabel(parents: Record<string, string>): string {
  const parts = Object.entries(parents).map(([name, state]) => {
    return `${name} = ${state}`;
  });
  return parts.join(", ");
}

export class TrendDialog {
  readonly element: HTMLDivElement;
  readonly variableSelect: HTMLSelectElement;
  readonly sourceSelect: HTMLSelectElement;
  readonly targetSelect: HTMLSelectElement;
  readonly alphaInput: HTMLInputElement;
  readonly directionSelect: HTMLSelectElement;
  readonly overwriteBox: HTMLInputElement;
  readonly previewTable: HTMLTableElement;
  private readonly doc: Document;
  private readonly api: ApiClient;
  private readonly byVariable: Map<string, DistributionRef[]>;
  private readonly onApplied?: () => void;
  private readonly onStatus?: (message: string) => void;

  constructor(doc: Document, options: TrendDialogOptions) {
    this.doc = doc;
    this.api = options.api;
    this.onApplied = options.onApplied;
    this.onStatus = options.onStatus;

    this.byVariable = new Map();
    for (const ref of options.plan.distributions) {
      if (Object.keys(ref.parents).length === 0) {
        continue;
      }
      const refs = this.byVariable.get(ref.variable) ?? [];
      refs.push(ref);
      this.byVariable.set(ref.variable, refs);
    }

    this.element = doc.createElement("div");
    this.element.className = "trend-dialog";

    const heading = doc.createElement("h2");
    heading.textContent = "Derive one row from another";
    this.element.appendChild(heading);

    this.variableSelect = doc.createElement("select");
    this.variableSelect.className = "trend-variable";
    for (const variable of this.byVariable.keys()) {
      const option = doc.createElement("option");
      option.value = variable;
      option.textContent = variable;
      this.variableSelect.appendChild(option);
    }
    this.variableSelect.onchange = () => this.fillConfigSelects();
    this.element.appendChild(labeled(doc, "Variable", this.variableSelect));

    this.sourceSelect = doc.createElement("select");
    this.sourceSelect.className = "trend-source";
    this.element.appendChild(labeled(doc, "Source row", this.sourceSelect));

    this.targetSelect = doc.createElement("select");
    this.targetSelect.className = "trend-target";
    this.element.appendChild(labeled(doc, "Target row", this.targetSelect));

    this.alphaInput = doc.createElement("input");
    this.alphaInput.type = "number";
    this.alphaInput.min = "0";
    this.alphaInput.max = "1";
    this.alphaInput.step = "0.05";
    this.alphaInput.value = "0.1";
    this.element.appendChild(
      labeled(doc, "Fraction of mass to shift", this.alphaInput),
    );

    this.directionSelect = doc.createElement("select");
    for (const direction of ["toward-last", "toward-first"]) {
      const option = doc.createElement("option");
      option.value = direction;
      option.textContent = direction;
      this.directionSelect.appendChild(option);
    }
    this.element.appendChild(labeled(doc, "Direction", this.directionSelect));

    this.overwriteBox = doc.createElement("input");
    this.overwriteBox.type = "checkbox";
    this.element.appendChild(
      labeled(doc, "Overwrite manual assessments", this.overwriteBox),
    );

    const buttons = doc.createElement("div");
    buttons.className = "trend-buttons";
    const previewButton = doc.createElement("button");
    previewButton.type = "button";
    previewButton.textContent = "Preview";
    previewButton.onclick = () => {
      void this.preview();
    };
    buttons.appendChild(previewButton);
    const applyButton = doc.createElement("button");
    applyButton.type = "button";
    applyButton.textContent = "Apply";
    applyButton.onclick = () => {
      void this.apply();
    };
    buttons.appendChild(applyButton);
    this.element.appendChild(buttons);

    this.previewTable = doc.createElement("table");
    this.previewTable.className = "trend-preview";
    this.element.appendChild(this.previewTable);

    this.fillConfigSelects();
  }

  private fillConfigSelects(): void {
    const refs = this.byVariable.get(this.variableSelect.value) ?? [];
    for (const select of [this.sourceSelect, this.targetSelect]) {
      select.textContent = "";
      for (const ref of refs) {
        const option = this.doc.createElement("option");
        option.value = JSON.stringify(ref.parents);
        option.textContent = parentsLabel(ref.parents);
        select.appendChild(option);
      }
    }
    if (refs.length > 1) {
      this.targetSelect.selectedIndex = 1;
    }
  }

  /** The request the current form state describes. */
  readRequest(): TrendRequest {
    const variable = this.variableSelect.value;
    return {
      source: {
        variable,
        parents: JSON.parse(this.sourceSelect.value || "{}"),
      },
      target: {
        variable,
        parents: JSON.parse(this.targetSelect.value || "{}"),
      },
      alpha: Number(this.alphaInput.value),
      direction: this.directionSelect.value as TrendDirection,
      overwrite: this.overwriteBox.checked,
    };
  }

  async preview(): Promise<void> {
    try {
      const preview = await this.api.previewTrend(this.readRequest());
      this.showValues(preview.values, "previewed");
    } catch (error) {
      this.report(describeError(error));
    }
  }

  async apply(): Promise<void> {
    try {
      const applied = await this.api.applyTrend(this.readRequest());
      const values: Record<string, number> = {};
      for (const assessment of applied.assessments) {
        values[assessment.state] = assessment.value;
      }
      this.showValues(values, "stored");
      if (this.onApplied) {
        this.onApplied();
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.report(`${error.message}; tick overwrite to replace them`);
        return;
      }
      this.report(describeError(error));
    }
  }

  private showValues(values: Record<string, number>, what: string): void {
    this.previewTable.textContent = "";
    const caption = this.doc.createElement("caption");
    caption.textContent = `${what} values`;
    this.previewTable.appendChild(caption);
    for (const [state, value] of Object.entries(values)) {
      const row = this.doc.createElement("tr");
      const name = this.doc.createElement("td");
      name.textContent = state;
      row.appendChild(name);
      const cell = this.doc.createElement("td");
      cell.textContent = String(value);
      row.appendChild(cell);
      this.previewTable.appendChild(row);
    }
  }

  private report(message: string): void {
    if (this.onStatus) {
      this.onStatus(message);
    }
  }
}

function labeled(
  doc: Document,
  text: string,
  control: HTMLElement,
): HTMLLabelElement {
  const label = doc.createElement("label");
  label.className = "trend-field";
  const span = doc.createElement("span");
  span.textContent = text;
  label.appendChild(span);
  label.appendChild(control);
  return label;
}
