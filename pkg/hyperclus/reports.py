"""
Run reports: the `key<TAB>value` report file, the bench table, and text blocks rendered
from the jinja2 templates in resources/templates.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .config import REPORT_KEYS, TEMPLATES_DIR

NA = "NA"


@dataclass(frozen=True)
class RunReport:
    dataset: str
    method: str
    k: int
    strategy: str
    ncut: float
    lambda2: Optional[float] = None
    relative_error: Optional[float] = None
    f1s: List[float] = field(default_factory=list)
    weighted_f1: Optional[float] = None
    seconds: Optional[float] = None

    def fields(self) -> Dict[str, str]:
        """Report values as strings, in REPORT_KEYS order."""
        values = {
            "dataset": self.dataset,
            "method": self.method,
            "k": str(self.k),
            "strategy": self.strategy,
            "ncut": format_float(self.ncut),
            "lambda2": format_float(self.lambda2),
            "relative_error": format_float(self.relative_error),
            "f1s": ",".join(format_float(f) for f in self.f1s) if self.f1s else NA,
            "weighted_f1": format_float(self.weighted_f1),
            "seconds": NA if self.seconds is None else f"{self.seconds:.3f}",
        }
        return {key: values[key] for key in REPORT_KEYS}


def format_float(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return NA
    return f"{value:.10g}"


def format_report(report: RunReport) -> str:
    return "".join(f"{key}\t{value}\n" for key, value in report.fields().items())


def bench_header() -> str:
    return "\t".join(REPORT_KEYS + ["status"]) + "\n"


def bench_row(report: RunReport, status: str = "OK") -> str:
    return "\t".join(list(report.fields().values()) + [status]) + "\n"


def bench_failure_row(dataset: str, method: str, k: int, strategy: str, reason: str) -> str:
    cells = {key: NA for key in REPORT_KEYS}
    cells.update(dataset=dataset, method=method, k=str(k), strategy=strategy)
    reason = " ".join(reason.split())
    return "\t".join(list(cells.values()) + [f"FAILED: {reason}"]) + "\n"


# =============================================================================
# TEMPLATES
# =============================================================================

_environment: Optional[Environment] = None


def _env() -> Environment:
    global _environment
    if _environment is None:
        _environment = Environment(
            loader=FileSystemLoader(str(TEMPLATES_DIR)),
            undefined=StrictUndefined,
            keep_trailing_newline=True,
            trim_blocks=True,
            lstrip_blocks=True,
        )
        _environment.filters["num"] = format_float
    return _environment


def render(template: str, **context: Any) -> str:
    """Render resources/templates/<template>."""
    return _env().get_template(template).render(**context)
