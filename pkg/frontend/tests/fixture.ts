import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Bundle, parseBundle } from "../src/bundle.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixtureDoc(): unknown {
  return JSON.parse(readFileSync(join(here, "fixtures", "bundle.json"), "utf-8"));
}

export function fixtureBundle(): Bundle {
  return parseBundle(fixtureDoc());
}
