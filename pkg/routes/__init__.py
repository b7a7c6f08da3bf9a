"""
Routes Package - Initialize all route blueprints
"""

from .api_routes import api_bp
from .report_routes import report_bp

def register_blueprints(app):
    """Register all route blueprints with the Flask app."""
    app.register_blueprint(api_bp)
    app.register_blueprint(report_bp)
