"""
URL configuration for bflyflow.

Only the admin is exposed, for browsing recorded experiment runs.
"""
from django.contrib import admin
from django.urls import path


urlpatterns = [
    path('admin/', admin.site.urls),
]
