#!/usr/bin/env node
import { renderCurve } from "./curve.js";
import { runRenderer } from "./render.js";

process.exit(runRenderer("render_curve", renderCurve, process.argv.slice(2)));
