import { renderSimplexScatter } from "./simplex_scatter.js";
import { runScript } from "./figspec.js";

runScript("simplex_scatter", renderSimplexScatter);
