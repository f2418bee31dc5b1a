import { renderProfile } from "./profile.js";
import { runScript } from "./figspec.js";

runScript("profile", renderProfile);
