"""
StageTimer - Wall-clock timing of experiment stages.
Follows Single Responsibility Principle - only measures time; timings go to metadata, never to results.
"""
import time


class StageTimer:
    """Times the stages of an experiment, one active stage at a time."""

    def __init__(self):
        self.durations = {}
        self.current_stage = None
        self.stage_start_time = None

    def start_stage_timer(self, stage):
        """Start timing a stage, closing the previous one"""
        if self.current_stage is not None:
            self.end_stage_timer()
        self.current_stage = stage
        self.stage_start_time = time.perf_counter()

    def end_stage_timer(self):
        """End timing the active stage"""
        if self.current_stage is not None and self.stage_start_time is not None:
            elapsed = time.perf_counter() - self.stage_start_time
            self.durations[self.current_stage] = self.durations.get(self.current_stage, 0.0) + elapsed
        self.current_stage = None
        self.stage_start_time = None

    def get_current_time(self):
        """Elapsed time of the active stage"""
        if self.stage_start_time is None:
            return 0.0
        return time.perf_counter() - self.stage_start_time

    def total(self):
        return sum(self.durations.values()) + self.get_current_time()
