#!/usr/bin/env node
import { renderProfile } from "./profile.js";
import { runRenderer } from "./render.js";

process.exit(runRenderer("render_profile", renderProfile, process.argv.slice(2)));
