#!/usr/bin/env node
import { renderHeatmap } from "./heatmap.js";
import { runRenderer } from "./render.js";

process.exit(runRenderer("render_heatmap", renderHeatmap, process.argv.slice(2)));
