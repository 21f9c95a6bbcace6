# backend/app/__init__.py
# Gaussian well toolkit package
