"""
Audit records of structure iteration runs.
"""

import uuid

from django.db import models
from django.utils import timezone


class TrainingRun(models.Model):
    """One ``train`` invocation."""

    STATUS_CHOICES = [
        ('running', 'Running'),
        ('converged', 'Converged'),
        ('stopped', 'Stopped at pass limit'),
        ('failed', 'Failed'),
    ]

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    seed = models.IntegerField()
    run_dir = models.CharField(max_length=500)
    config = models.JSONField(default=dict)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='running')
    final_tree = models.CharField(max_length=500, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['seed'], name='trainer_tra_seed_3f1c2a_idx'),
            models.Index(fields=['status'], name='trainer_tra_status_8d0e4b_idx'),
            models.Index(fields=['created_at'], name='trainer_tra_created_5b7a91_idx'),
        ]

    def __str__(self):
        return f"Run {self.run_dir} (seed {self.seed}) - {self.status}"

    @property
    def converged(self):
        return self.status == 'converged'

    @classmethod
    def start(cls, config, run_dir):
        return cls.objects.create(seed=config.seed, run_dir=str(run_dir), config=config.to_dict())

    def log_pass(self, record):
        return self.passes.create(
            pass_index=record.index,
            tree=record.tree_text,
            oa=record.report.oa,
            mean_f1=record.report.mean_f1,
            checkpoint=record.checkpoint,
            details={'confusion': record.confusion.counts.tolist(), 'losses': list(record.losses)},
        )

    def finish(self, result):
        self.status = 'converged' if result.converged else 'stopped'
        self.final_tree = result.records[-1].tree_text if result.records else ''
        self.finished_at = timezone.now()
        self.save()

    def fail(self):
        self.status = 'failed'
        self.finished_at = timezone.now()
        self.save()


class StructurePassLog(models.Model):
    """Per-pass summary of a training run."""

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    run = models.ForeignKey(TrainingRun, on_delete=models.CASCADE, related_name='passes')
    pass_index = models.IntegerField()
    tree = models.CharField(max_length=500, blank=True)
    oa = models.FloatField()
    mean_f1 = models.FloatField()
    checkpoint = models.CharField(max_length=500, blank=True)
    details = models.JSONField(default=dict)
    timestamp = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['run', 'pass_index']
        unique_together = ['run', 'pass_index']
        indexes = [
            models.Index(fields=['run', 'pass_index'], name='trainer_str_run_id_c4e2d7_idx'),
        ]

    def __str__(self):
        return f"Pass {self.pass_index} of {self.run_id} - OA {self.oa:.4f}"
