"""FastAPI service layer: schemas, handlers and the ASGI app."""

from .handlers import app, create_app

__all__ = ["app", "create_app"]
