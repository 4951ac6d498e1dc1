from django.contrib import admin
from . import models

# Register your models here.

@admin.register(models.Run)
class RunAdmin(admin.ModelAdmin):
    list_display = ["id", "command", "status", "exit_code", "error_code", "created_time"]
    list_filter = ["command", "status"]
    search_fields = ["command", "error_code"]
    readonly_fields = ["command", "config", "report", "status", "exit_code", "error_code", "created_time", "deleted"]

    def get_queryset(self, request):
        return models.Run.objects_archive.all()

    def has_add_permission(self, request):
        return False
