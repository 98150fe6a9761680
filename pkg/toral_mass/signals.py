"""
Progress signals

Receivers are informational only; nothing connected here can change a result.
"""
from blinker import Namespace

_signals = Namespace()

#: Sent after each Monte Carlo chunk. kwargs: start, stop, total
batch_sampled = _signals.signal('batch-sampled')

#: Sent after a report file is written. kwargs: path, format, checksum
report_written = _signals.signal('report-written')
