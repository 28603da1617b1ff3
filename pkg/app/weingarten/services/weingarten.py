import logging

from app.weingarten import schemes
from app.weingarten.services.classifier import classify
from app.weingarten.services.hyperbolic import normalize_relation
from app.weingarten.services.profile_ode import integrate
from app.weingarten.services.trace_analyzer import extract_features, reconcile
from app.weingarten.utils import exceptions

__all__ = [
    "WeingartenService",
]

logger = logging.getLogger(__name__)


class WeingartenService:
    """
    Entry point shared by the HTTP views and the command line: normalize raw coefficients,
    classify, trace and reconcile.
    """

    def relation(self, request: schemes.ClassifyRequest) -> schemes.WeingartenRelation:
        """
        Raises:
            exceptions.InvalidRelationException: If no curvature coefficient is non-zero.
            exceptions.TrivialRelationException: If one principal curvature is constant.
        """
        return normalize_relation(request.a, request.b, request.c, request.kind)

    def classify(self, request: schemes.ClassifyRequest) -> schemes.ClassificationVerdict:
        """
        Closed form verdict for raw coefficients, trivial relations included. Nothing is integrated.
        Raises:
            exceptions.InvalidRelationException: If no curvature coefficient is non-zero.
        """
        try:
            relation = self.relation(request)
        except exceptions.TrivialRelationException as exc:
            return exc.verdict
        return classify(relation, request.theta0)

    def trace(
        self, request: schemes.VerifyRequest, options: schemes.StepOptions | None = None
    ) -> schemes.Trace:
        if options is None and request.max_arclength is not None:
            options = schemes.StepOptions(max_arclength=request.max_arclength)
        init = schemes.InitialData(z0=request.z0, theta0=request.theta0)
        return integrate(self.relation(request), init, options)

    def verify(
        self, request: schemes.VerifyRequest, options: schemes.StepOptions | None = None
    ) -> tuple[schemes.Trace | None, schemes.ReconciliationReport | None]:
        """
        Trace the profile and reconcile it with the verdict.
        Returns:
            tuple[schemes.Trace | None, schemes.ReconciliationReport | None]: both None for a trivial relation.
        Raises:
            exceptions.StepFailureException: If the stepper fails without a recognized event.
        """
        try:
            trace = self.trace(request, options)
        except exceptions.TrivialRelationException:
            return None, None
        verdict = classify(trace.relation, request.theta0)
        report = reconcile(extract_features(trace), verdict, request.z0)
        logger.debug("%s: %s, passed %s", trace.relation.label(), verdict.shape_class.value, report.passed)
        return trace, report

    def verify_response(self, request: schemes.VerifyRequest) -> schemes.VerifyResponse:
        trace, report = self.verify(request)
        if trace is None or report is None:
            return schemes.VerifyResponse(
                verdict=self.classify(request).to_json(),
                passed=True,
                vacuous=True,
                failures=[],
                s_extent=(0.0, 0.0),
                states=0,
            )
        return schemes.VerifyResponse(
            verdict=report.verdict.to_json(),
            passed=report.passed,
            vacuous=report.vacuous,
            failures=[p.name for p in report.failures],
            s_extent=trace.s_extent,
            states=len(trace),
        )
