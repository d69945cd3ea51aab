from collections.abc import Iterable

from ..errors import EmptyInputError, MissingTimingsError
from ..transcript import EndpointMode, endpoint_truncate
from .longform import Domain, UtteranceRecord


def ep_latency(
    record: UtteranceRecord,
    mode: EndpointMode = EndpointMode.MERGED,
) -> float | None:
    """Get the time from the end of the user's speech to the microphone closing.

    The close time is the record's `mic_close_time` when present, otherwise the
    emit time of the endpointer signal in the hypothesis stream. Closing before the
    speech ends gives a negative latency, which is returned as is.

    Parameters
    ----------
    record : UtteranceRecord
        A Short-domain record whose reference carries word end times
    mode : EndpointMode
        Which token in the hypothesis stream closes the microphone

    Returns
    -------
    float | None
        Latency in seconds, or None if the microphone never closed

    Raises
    ------
    MissingTimingsError
        If the last reference word has no end time, or the close token has no emit
        time
    """
    if record.domain != Domain.SHORT:
        raise ValueError(
            f"Endpointer latency is only defined for {Domain.SHORT} records; "
            f"{record.id!r} is {record.domain}."
        )
    if not record.ref or record.ref[-1].end is None:
        raise MissingTimingsError(f"Record {record.id!r} has no reference end time.")

    close = record.mic_close_time
    if close is None:
        result = endpoint_truncate(record.hyp, mode)
        if not result.closed:
            return None
        if result.close_time is None:
            raise MissingTimingsError(
                f"Record {record.id!r} closes the microphone on a token without an "
                "emit time."
            )
        close = result.close_time
    return close - record.ref[-1].end


def nearest_rank(values: list[float], percent: int) -> float:
    """Get the nearest-rank percentile of already sorted values.

    The value at 1-based rank `ceil(percent / 100 * n)` is returned; integer
    arithmetic keeps the rank exact.
    """
    rank = max(1, -(-percent * len(values) // 100))
    return values[rank - 1]


def ep_quantiles(latencies: Iterable[float]) -> tuple[float, float]:
    """Compute the median (EP50) and 90th percentile (EP90) latencies.

    Raises
    ------
    EmptyInputError
        If there are no latencies
    """
    values = sorted(latencies)
    if not values:
        raise EmptyInputError("Cannot compute endpointer quantiles without latencies.")
    return nearest_rank(values, 50), nearest_rank(values, 90)
