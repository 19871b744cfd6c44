import math

import numpy as np

from gsm.utils.functional import stable_sum


class RiskStats:
    """Accumulates estimator errors ``Q_hat - Q(theta)`` chunk by chunk.

    Chunks must be fed in replicate order; :meth:`compute` then reduces them with
    compensated summation, so the result does not depend on how the replicates were
    split across workers.
    """
    def __init__(
        self,
        num_chunks: int = 0,
        errors: list[np.ndarray] | None = None,
    ) -> None:
        self.num_chunks = num_chunks
        self.errors = errors if errors is not None else []

    def update_step(self, errors: np.ndarray) -> None:
        self.errors.append(np.asarray(errors, dtype=np.float64).ravel())
        self.num_chunks += 1

    @property
    def replicates(self) -> int:
        return int(sum(chunk.size for chunk in self.errors))

    def compute(self) -> dict[str, float]:
        errors = np.concatenate(self.errors) if self.errors else np.zeros(0)
        count = errors.size
        if count < 2:
            raise ValueError(f'At least two replicates are needed, got {count}')

        squared = errors * errors
        bias = stable_sum(errors) / count
        risk = stable_sum(squared) / count
        # second pass for the spread of the squared errors
        spread = stable_sum((squared - risk) ** 2) / (count - 1)
        return {
            'bias': bias,
            'variance': max(risk - bias * bias, 0.0),
            'risk': risk,
            'std_error': math.sqrt(spread / count),
            'replicates': count,
        }
