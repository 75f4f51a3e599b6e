from decompkit.metrics.judge import JudgeScore, judge_identifier_quality
from decompkit.metrics.r2i import R2IScore, r2i_score
from decompkit.metrics.reexec import (
    ReexecResult,
    TestCaseSuite,
    reexecutability_rate,
    reexecute,
    restore_function_name,
)

__all__ = [
    "JudgeScore", "judge_identifier_quality", "R2IScore", "r2i_score", "ReexecResult",
    "TestCaseSuite", "reexecutability_rate", "reexecute", "restore_function_name",
]
