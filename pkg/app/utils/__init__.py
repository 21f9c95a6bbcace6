# backend/app/utils/__init__.py
# Utils package initialization
