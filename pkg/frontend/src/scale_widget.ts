/** Vertical probability scale: verbal anchors on the left of the track,
 * numeric anchors on the right, one marker for the current value. Clicking
 * the track converts the click height to a probability, snaps it to the
 * grid, and hands the snapped value to the owner. */

import {
  clickToProbability,
  formatProbability,
  probabilityToY,
  storedProbability,
} from "./scale.js";
import { ScaleDoc } from "./types.js";

export interface ScaleWidgetOptions {
  scale: ScaleDoc;
  height?: number;
  onSelect?: (value: number) => void;
}

export const DEFAULT_TRACK_HEIGHT = 300;

export class ScaleWidget {
  readonly element: HTMLDivElement;
  readonly track: HTMLDivElement;
  readonly height: number;
  private readonly scale: ScaleDoc;
  private readonly marker: HTMLDivElement;
  private readonly readout: HTMLSpanElement;
  private readonly onSelect?: (value: number) => void;

  constructor(doc: Document, options: ScaleWidgetOptions) {
    this.scale = options.scale;
    this.height = options.height ?? DEFAULT_TRACK_HEIGHT;
    this.onSelect = options.onSelect;

    this.element = doc.createElement("div");
    this.element.className = "scale-widget";

    this.track = doc.createElement("div");
    this.track.className = "scale-track";
    this.track.style.position = "relative";
    this.track.style.height = `${this.height}px`;
    this.track.addEventListener("click", (event) => {
      this.handleClick(event as MouseEvent);
    });

    for (const anchor of this.scale.anchors) {
      const label = doc.createElement("div");
      label.className = `scale-anchor scale-anchor-${anchor.kind}`;
      label.style.position = "absolute";
      label.style.top = `${(1 - anchor.position) * 100}%`;
      label.dataset.position = String(anchor.position);
      label.textContent = anchor.label;
      this.track.appendChild(label);
    }

    this.marker = doc.createElement("div");
    this.marker.className = "scale-marker";
    this.marker.style.position = "absolute";
    this.marker.style.display = "none";
    this.track.appendChild(this.marker);

    this.readout = doc.createElement("span");
    this.readout.className = "scale-readout";
    this.readout.textContent = "unassessed";

    this.element.appendChild(this.track);
    this.element.appendChild(this.readout);
  }

  /** Probability for a click y pixels below the top of the track, snapped
   * to the grid exactly as the server will store it. */
  probabilityFromClick(y: number): number {
    const raw = clickToProbability(y, this.height);
    return storedProbability(raw, this.scale.rounding_grid);
  }

  private handleClick(event: MouseEvent): void {
    const rect = this.track.getBoundingClientRect();
    const value = this.probabilityFromClick(event.clientY - rect.top);
    this.setValue(value);
    if (this.onSelect) {
      this.onSelect(value);
    }
  }

  /** Show a value on the track, or clear the marker with null. */
  setValue(value: number | null): void {
    if (value === null) {
      this.marker.style.display = "none";
      this.readout.textContent = "unassessed";
      return;
    }
    this.marker.style.display = "block";
    this.marker.style.top = `${probabilityToY(value, this.height)}px`;
    this.readout.textContent = formatProbability(value);
  }
}
