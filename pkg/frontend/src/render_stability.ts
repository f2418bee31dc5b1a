import { renderStability } from "./stability.js";
import { runScript } from "./figspec.js";

runScript("stability", renderStability);
