# Generated by Django 6.0.1 on 2026-10-18 10:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('scenario_name', models.CharField(db_index=True, help_text='Name of the scenario config', max_length=100)),
                ('seed', models.CharField(help_text='RNG seed of this replicate (decimal digits)', max_length=20)),
                ('batch_label', models.CharField(blank=True, db_index=True, help_text='Groups replicates recorded by the same batch (optional)', max_length=100)),
                ('config', models.JSONField(help_text='Fully resolved scenario config (post-defaults)')),
                ('summary', models.JSONField(help_text='Replicate summary metrics')),
                ('captured', models.BooleanField(default=False, help_text='Whether every ground-truth peak was captured at once')),
                ('all_captured_iteration', models.IntegerField(blank=True, help_text='First iteration at which every peak was captured (null if never)', null=True)),
                ('final_mean_peak_distance', models.FloatField(help_text='Mean distance from each agent to its nearest peak at the end of the run')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['scenario_name', 'seed'], name='simulation_scenario_seed_idx')],
            },
        ),
    ]
