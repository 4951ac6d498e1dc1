from liegeo import models
import pytest

# Create your tests here.

@pytest.fixture
def run(db):
    return models.Run.objects.create(command="eds_report", config={"samples": 3}, report={"is_involutive": True})

@pytest.fixture
def failed_run(db):
    return models.Run.objects.create(
        command="cauchy",
        status=models.Run.Status.FAILED,
        exit_code=2,
        error_code="cauchy_solver.WindowTooLarge",
    )


def test_run_fields(db, run, failed_run):
    assert run.ok
    assert not failed_run.ok
    assert str(failed_run) == f"cauchy #{failed_run.pk} (failed)"
    assert list(models.Run.objects.failed()) == [failed_run]
    assert list(models.Run.objects.for_command("eds_report")) == [run]
    # newest first
    assert list(models.Run.objects.all()) == [failed_run, run]


def test_run_lifecycle(db, run):
    assert run in models.Run.objects.all()

    # soft-delete by default; still available in the archive Manager
    run.delete()
    assert run in models.Run.objects_archive.all()
    assert run not in models.Run.objects.all()

    # soft-delete can be reversed (via Manager)
    models.Run.objects_archive.undelete()
    assert run in models.Run.objects.all()

    # can also soft-delete a queryset
    models.Run.objects.delete()
    assert run in models.Run.objects_archive.all()
    assert run not in models.Run.objects.all()

    run.undelete()
    assert run in models.Run.objects.all()

    # hard-delete will permanently remove it from the database
    models.Run.objects_archive.delete(hard_delete=True)
    assert run not in models.Run.objects_archive.all()
    with pytest.raises(models.Run.DoesNotExist):
        models.Run.objects_archive.get(pk=run.pk)
