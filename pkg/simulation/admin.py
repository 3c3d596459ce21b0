"""
Admin interface for recorded experiment runs.
"""
from django.contrib import admin
from .models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    """Admin interface for Experiment Runs"""

    list_display = [
        'scenario_name',
        'seed',
        'batch_label',
        'captured',
        'all_captured_iteration',
        'final_mean_peak_distance',
        'created_at',
    ]

    list_filter = [
        'scenario_name',
        'captured',
        'created_at',
    ]

    search_fields = [
        'scenario_name',
        'batch_label',
    ]

    readonly_fields = [
        'config',
        'summary',
        'created_at',
    ]

    date_hierarchy = 'created_at'
