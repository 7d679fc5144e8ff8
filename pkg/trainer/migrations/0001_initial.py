# Generated by Django 5.0.2 on 2026-10-19 10:12

import django.db.models.deletion
import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='TrainingRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('seed', models.IntegerField()),
                ('run_dir', models.CharField(max_length=500)),
                ('config', models.JSONField(default=dict)),
                ('status', models.CharField(choices=[('running', 'Running'), ('converged', 'Converged'), ('stopped', 'Stopped at pass limit'), ('failed', 'Failed')], default='running', max_length=20)),
                ('final_tree', models.CharField(blank=True, max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['seed'], name='trainer_tra_seed_3f1c2a_idx'), models.Index(fields=['status'], name='trainer_tra_status_8d0e4b_idx'), models.Index(fields=['created_at'], name='trainer_tra_created_5b7a91_idx')],
            },
        ),
        migrations.CreateModel(
            name='StructurePassLog',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('pass_index', models.IntegerField()),
                ('tree', models.CharField(blank=True, max_length=500)),
                ('oa', models.FloatField()),
                ('mean_f1', models.FloatField()),
                ('checkpoint', models.CharField(blank=True, max_length=500)),
                ('details', models.JSONField(default=dict)),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='passes', to='trainer.trainingrun')),
            ],
            options={
                'ordering': ['run', 'pass_index'],
                'indexes': [models.Index(fields=['run', 'pass_index'], name='trainer_str_run_id_c4e2d7_idx')],
                'unique_together': {('run', 'pass_index')},
            },
        ),
    ]
