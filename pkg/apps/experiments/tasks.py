"""
Celery tasks for sweep points and optimizer comparisons
"""
from dataclasses import asdict

from celery import group, shared_task

from .services import Scenario, compare_geometry, evaluate_point


@shared_task
def evaluate_point_task(scenario, analytical=True, simulated=True, workers=None):
    """Evaluate one sweep point given as a Scenario dict"""
    return evaluate_point(Scenario.from_dict(scenario), analytical, simulated, workers)


@shared_task
def compare_geometry_task(scenario, geometry, per_realization=False, workers=None):
    """SSROT against FPAPT rows for one Eve geometry"""
    return compare_geometry(Scenario.from_dict(scenario), geometry, per_realization, workers)


def run_points(scenarios, analytical, simulated, workers=None):
    """Fan sweep points out and collect rows in sweep order"""
    job = group(
        evaluate_point_task.s(asdict(scenario), analytical, simulated, workers)
        for scenario in scenarios
    )
    return job.apply_async().get()


def run_comparisons(jobs, per_realization=False, workers=None):
    job = group(
        compare_geometry_task.s(asdict(scenario), label, per_realization, workers)
        for label, scenario in jobs
    )
    return job.apply_async().get()
