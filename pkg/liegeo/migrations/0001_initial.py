# Generated by Django 4.0.5 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Run',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.SlugField(max_length=32)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('report', models.JSONField(blank=True, null=True)),
                ('status', models.CharField(choices=[('ok', 'Ok'), ('failed', 'Failed')], default='ok', max_length=8)),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('error_code', models.CharField(blank=True, help_text='Module-qualified code of the error that ended the run, e.g. `cauchy_solver.WindowTooLarge`.', max_length=64)),
                ('created_time', models.DateTimeField(auto_now_add=True)),
                ('deleted', models.BooleanField(db_index=True, default=False, editable=False, help_text="True indicates the run has been soft-deleted and won't appear in most queries.")),
            ],
            options={
                'ordering': ['-created_time', '-id'],
            },
        ),
    ]
