# backend/app/api/__init__.py
# API package initialization
