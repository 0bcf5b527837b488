/** One elicitation sheet: every item gets its question fragment, a scale
 * widget, and the stored assessment. Marks are posted to the server and the
 * widget is updated with the value the server actually stored. */

import { ApiClient, ApiError } from "./api.js";
import { ScaleWidget } from "./scale_widget.js";
import {
  DistributionDoc,
  PlanItem,
  ScaleDoc,
  SheetDoc,
} from "./types.js";

export interface SheetViewOptions {
  api: ApiClient;
  scale: ScaleDoc;
  onStatus?: (message: string) => void;
}

function configLabel(config: Record<string, string>): string {
  const parts = Object.entries(config).map(([name, state]) => {
    return `${name} = ${state}`;
  });
  return parts.length ? parts.join(", ") : "no conditioning context";
}

function distributionKey(variable: string, config: Record<string, string>) {
  return `${variable}|${JSON.stringify(config)}`;
}

export class SheetView {
  readonly element: HTMLDivElement;
  private readonly doc: Document;
  private readonly api: ApiClient;
  private readonly scale: ScaleDoc;
  private readonly onStatus?: (message: string) => void;
  private widgets: Map<string, ScaleWidget>;
  private provenanceNotes: Map<string, HTMLElement>;
  private residualNotes: Map<string, HTMLElement>;

  constructor(doc: Document, options: SheetViewOptions) {
    this.doc = doc;
    this.api = options.api;
    this.scale = options.scale;
    this.onStatus = options.onStatus;
    this.widgets = new Map();
    this.provenanceNotes = new Map();
    this.residualNotes = new Map();
    this.element = doc.createElement("div");
    this.element.className = "sheet-view";
  }

  async render(sheet: SheetDoc): Promise<void> {
    this.element.textContent = "";
    this.widgets = new Map();
    this.provenanceNotes = new Map();
    this.residualNotes = new Map();

    const heading = this.doc.createElement("h2");
    heading.textContent = `Sheet ${sheet.index + 1}`;
    this.element.appendChild(heading);

    for (const item of sheet.items) {
      this.element.appendChild(this.buildItemBlock(item));
    }
    await this.refreshDistributions(sheet.items);
  }

  private buildItemBlock(item: PlanItem): HTMLDivElement {
    const block = this.doc.createElement("div");
    block.className = "sheet-item";

    const context = this.doc.createElement("p");
    context.className = "sheet-item-context";
    context.textContent = configLabel(item.parent_config);
    block.appendChild(context);

    const fragment = this.doc.createElement("p");
    fragment.className = "sheet-item-fragment";
    fragment.textContent = item.fragment;
    block.appendChild(fragment);

    const widget = new ScaleWidget(this.doc, {
      scale: this.scale,
      onSelect: (value) => {
        void this.submit(item, value);
      },
    });
    this.widgets.set(item.item_id, widget);
    block.appendChild(widget.element);

    const provenance = this.doc.createElement("p");
    provenance.className = "sheet-item-provenance";
    this.provenanceNotes.set(item.item_id, provenance);
    block.appendChild(provenance);

    const residual = this.doc.createElement("p");
    residual.className = "sheet-item-residual";
    const key = distributionKey(item.variable, item.parent_config);
    if (!this.residualNotes.has(key)) {
      this.residualNotes.set(key, residual);
      block.appendChild(residual);
      const accept = this.doc.createElement("button");
      accept.type = "button";
      accept.textContent = "Assign the unclaimed mass to the open states";
      accept.onclick = () => {
        void this.acceptResidual(item);
      };
      block.appendChild(accept);
    }
    return block;
  }

  private async submit(item: PlanItem, value: number): Promise<void> {
    try {
      const response = await this.api.recordNumeric(item.item_id, value);
      this.applyDistribution(response.distribution);
      this.report(
        `${item.item_id} stored as ${response.assessment.value}`,
      );
    } catch (error) {
      this.report(describeError(error));
    }
  }

  private async acceptResidual(item: PlanItem): Promise<void> {
    try {
      const response = await this.api.acceptResidual(
        item.variable,
        item.parent_config,
      );
      this.applyDistribution(response.distribution);
      this.report(
        `filled ${response.assessments.length} open state(s) of ` +
          `${item.variable}`,
      );
    } catch (error) {
      this.report(describeError(error));
    }
  }

  private async refreshDistributions(items: PlanItem[]): Promise<void> {
    const seen = new Set<string>();
    for (const item of items) {
      const key = distributionKey(item.variable, item.parent_config);
      if (seen.has(key)) {
        continue;
      }
      seen.add(key);
      try {
        const doc = await this.api.distribution(
          item.variable,
          item.parent_config,
        );
        this.applyDistribution(doc);
      } catch (error) {
        this.report(describeError(error));
      }
    }
  }

  /** Push the stored values of one distribution into its widgets. */
  applyDistribution(doc: DistributionDoc): void {
    for (const entry of doc.items) {
      const widget = this.widgets.get(entry.item_id);
      if (widget === undefined) {
        continue;
      }
      widget.setValue(entry.assessment ? entry.assessment.value : null);
      const note = this.provenanceNotes.get(entry.item_id);
      if (note) {
        note.textContent = entry.assessment
          ? `${entry.assessment.provenance}` +
            (entry.assessment.source_detail
              ? ` (${entry.assessment.source_detail})`
              : "")
          : "";
      }
    }
    const key = distributionKey(doc.variable, doc.parent_config);
    const residual = this.residualNotes.get(key);
    if (residual) {
      const mass = doc.residual_mass;
      residual.textContent = doc.complete
        ? "distribution complete"
        : `unclaimed mass: ${mass.toFixed(2)}` +
          (doc.violations.length ? ` (${doc.violations.join("; ")})` : "");
    }
  }

  private report(message: string): void {
    if (this.onStatus) {
      this.onStatus(message);
    }
  }
}

export function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    const extra = error.violations.length
      ? `: ${error.violations.join("; ")}`
      : "";
    return `${error.message}${extra}`;
  }
  return String(error);
}
