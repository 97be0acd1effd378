# flowtwist/models/__init__.py
