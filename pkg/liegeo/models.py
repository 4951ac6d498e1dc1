import logging
from django.db import models
from django.db import transaction

# Create your models here.

logger = logging.getLogger(__name__)


class Run(models.Model):
    """
    A recorded invocation of one of the liegeo management commands, with its configuration and JSON report.

    Runs are soft-deleted by default, and "deleted" runs are excluded from the default Manager.
    To permanently remove a Run from the database, specify `run.delete(hard_delete=True)`.
    """
    class Status(models.TextChoices):
        OK = "ok"
        FAILED = "failed"

    class QuerySet(models.QuerySet):
        def for_command(self, command):
            return self.filter(command=command)

        def failed(self):
            return self.filter(status=Run.Status.FAILED)

        def delete(self, hard_delete=False):
            if hard_delete:
                return super().delete()
            else:
                self.update(deleted=True)

        def undelete(self):
            """
            Reverses the soft-deletion of runs in the queryset.

            Note that the default `objects` manager won't select soft-deleted runs, so make sure to use the `objects_archive` manager instead.
            """
            with transaction.atomic():
                self.update(deleted=False)

    class ArchiveManager(models.Manager.from_queryset(QuerySet)):
        use_in_migrations = False

    class Manager(ArchiveManager):
        def get_queryset(self):
            return super().get_queryset().exclude(deleted=True)

    objects = Manager()
    objects_archive = ArchiveManager()

    command = models.SlugField(max_length=32, db_index=True)
    config = models.JSONField(default=dict, blank=True)
    report = models.JSONField(null=True, blank=True)
    status = models.CharField(max_length=8, choices=Status.choices, default=Status.OK)
    exit_code = models.PositiveSmallIntegerField(default=0)
    error_code = models.CharField(
        max_length=64,
        blank=True,
        help_text="Module-qualified code of the error that ended the run, e.g. `cauchy_solver.WindowTooLarge`.",
    )
    created_time = models.DateTimeField(auto_now_add=True)
    deleted = models.BooleanField(
        default=False,
        editable=False,
        db_index=True,
        help_text="True indicates the run has been soft-deleted and won't appear in most queries."
    )

    class Meta:
        ordering = ["-created_time", "-id"]

    def __str__(self):
        return f"{self.command} #{self.pk} ({self.status})"

    @property
    def ok(self):
        return self.status == self.Status.OK

    def delete(self, hard_delete=False, *args, **kwargs):
        """
        Soft-deletes the run, keeping it in the database but marking it deleted, causing the default Manager to exclude it.

        Specify `hard_delete=True` to permanently delete it.
        """
        if hard_delete:
            return super().delete(*args, **kwargs)
        self.deleted = True
        self.save(update_fields=["deleted"])
        logger.debug(f"soft-deleted run {self.pk}")

    def undelete(self):
        self.deleted = False
        self.save(update_fields=["deleted"])
