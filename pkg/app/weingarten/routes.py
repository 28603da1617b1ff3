from app.weingarten import views


def setup_routes(app):
    app.router.add_view("/api/v1/classify", views.ClassifyView)
    app.router.add_view("/api/v1/verify", views.VerifyView)
