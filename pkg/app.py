"""
Main Flask application entry point for the BSC four-codeword toolkit.

create_app() builds a configured app; tests pass their own store path and worker count.
Routes are organized in separate blueprint modules in the routes package; the
command line is attached as `flask bsc4 ...`.
"""

from flask import Flask

import config
import database
from cli import cli
from routes import register_blueprints


def create_app(test_config=None):
    """
    Build the Flask app, initialise the result store and register the blueprints.

    Args:
        test_config: optional mapping overriding the defaults from config.py

    Returns:
        Flask: the application, ready to serve or to drive through test_client()
    """
    app = Flask(__name__)
    app.config.from_mapping(
        DATABASE=config.DATABASE,
        WORKERS=config.DEFAULT_WORKERS,
        WEB_VERIFY_MAX_N=config.WEB_VERIFY_MAX_N,
    )
    if test_config:
        app.config.from_mapping(test_config)
    # text templates are shared with the command line renderer
    app.jinja_options = {**app.jinja_options, 'trim_blocks': True, 'lstrip_blocks': True,
                         'keep_trailing_newline': True}

    # Initialize the result store
    database.DATABASE = app.config['DATABASE']
    database.init_database()

    # JSON API, text reports and the bsc4 command group
    register_blueprints(app)
    app.cli.add_command(cli, 'bsc4')

    return app


if __name__ == '__main__':
    app = create_app()
    app.run(debug=True, host='0.0.0.0', port=5000)
