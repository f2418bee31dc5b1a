import { renderTrajectory } from "./trajectory.js";
import { runScript } from "./figspec.js";

runScript("trajectory", renderTrajectory);
