# backend/app/services/__init__.py
# Services package initialization
