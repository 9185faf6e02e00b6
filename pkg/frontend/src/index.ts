export {
  aggregatePlanning,
  aggregateResults,
  buildFigure,
  loadPlanningRows,
  loadResultRows,
} from "./aggregate";
export type { FigureData, Series } from "./aggregate";
export { Canvas, renderFigure, textWidth } from "./chart";
export {
  FIGURE_KINDS,
  KIND_TO_SWEEP,
  PLANNING_HEADER,
  RESULT_HEADER,
  SchemaError,
  checkHeader,
} from "./schema";
export type { FigureKind, PlanningRow, ResultRow } from "./schema";
export { main, run } from "./figgen";
