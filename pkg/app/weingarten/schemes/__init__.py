from app.weingarten.schemes.figures import *
from app.weingarten.schemes.meshes import *
from app.weingarten.schemes.relations import *
from app.weingarten.schemes.requests import *
from app.weingarten.schemes.sweeps import *
from app.weingarten.schemes.traces import *
from app.weingarten.schemes.verdicts import *

__all__ = [
    "RelationKind",
    "TrivialKind",
    "WeingartenRelation",
    "ProfileState",
    "CurvaturePair",
    "InitialData",
    "StepOptions",
    "CIRCLE_LOCUS_EPS",
    "Direction",
    "EventKind",
    "Phase",
    "IntegrationEvent",
    "Trace",
    "ShapeClass",
    "AsymptoticBoundary",
    "ContactEquation",
    "AngleRole",
    "Convexity",
    "Monotonicity",
    "EndBehavior",
    "CompleteEvidence",
    "ExtremumKind",
    "ContactAngle",
    "ClassificationVerdict",
    "Extremum",
    "SelfIntersection",
    "Period",
    "TraceFeatures",
    "PredicateResult",
    "ReconciliationReport",
    "FigurePanel",
    "GALLERY",
    "ParabolicMesh",
    "CurvatureAudit",
    "Axis",
    "SweepSpec",
    "SweepCell",
    "BoundarySample",
    "PhaseDiagram",
    "SweepManifest",
    "B0Result",
    "ClassifyRequest",
    "VerifyRequest",
    "VerifyResponse",
]
