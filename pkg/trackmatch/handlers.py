"""Input handlers for trackmatch-documents."""

from data_plumber_http import (
    Object,
    Property,
    String,
    Boolean,
    Integer,
    Number,
    Array,
)

from trackmatch.models import (
    CoordinateSystem,
    NetworkDocument,
    MatchMethod,
    SamplingDistribution,
    SweepSpec,
)


network_document_handler = Object(
    model=lambda **kwargs: {"network": NetworkDocument.from_json(kwargs)},
    properties={
        Property("crs"): String(enum=[crs.value for crs in CoordinateSystem]),
        Property("nodes", required=True): Array(
            items=Object(
                properties={
                    Property("id", required=True): Integer(),
                    Property("x", required=True): Number(),
                    Property("y", required=True): Number(),
                },
                accept_only=["id", "x", "y"],
            )
        ),
        Property("edges", required=True): Array(
            items=Object(
                properties={
                    Property("id", required=True): Integer(),
                    Property("from", required=True): Integer(),
                    Property("to", required=True): Integer(),
                    Property("speed_limit", required=True): Number(
                        min_value_inclusive=0
                    ),
                    Property("oneway"): Boolean(),
                    Property("geometry"): Array(
                        items=Array(items=Number())
                    ),
                },
                accept_only=[
                    "id", "from", "to", "speed_limit", "oneway", "geometry"
                ],
            )
        ),
    },
    accept_only=["crs", "nodes", "edges"],
).assemble()


sweep_spec_handler = Object(
    model=lambda **kwargs: {"spec": SweepSpec.from_json(kwargs)},
    properties={
        Property("sigmas", required=True): Array(
            items=Number(min_value_inclusive=0)
        ),
        Property("taus", required=True): Array(
            items=Number(min_value_inclusive=0)
        ),
        Property("lambdas", required=True): Array(),
        Property("methods", required=True): Array(
            items=String(enum=[method.value for method in MatchMethod])
        ),
        Property("trackCounts"): Array(items=Integer(min_value_inclusive=1)),
        Property("routes"): Integer(min_value_inclusive=1),
        Property("instances"): Integer(min_value_inclusive=1),
        Property("seed"): Integer(min_value_inclusive=0),
        Property("trimFraction"): Number(
            min_value_inclusive=0, max_value_inclusive=0.5
        ),
        Property("distribution"): String(
            enum=[distribution.value for distribution in SamplingDistribution]
        ),
        Property("routeMinLength"): Number(min_value_inclusive=0),
        Property("routeMaxLength"): Number(min_value_inclusive=0),
        Property("subsamples"): Integer(min_value_inclusive=1),
        Property("inclusionProbability"): Number(
            min_value_inclusive=0, max_value_inclusive=1
        ),
        Property("restarts"): Integer(min_value_inclusive=1),
        Property("recordRuntime"): Boolean(),
    },
    accept_only=[
        "sigmas",
        "taus",
        "lambdas",
        "methods",
        "trackCounts",
        "routes",
        "instances",
        "seed",
        "trimFraction",
        "distribution",
        "routeMinLength",
        "routeMaxLength",
        "subsamples",
        "inclusionProbability",
        "restarts",
        "recordRuntime",
    ],
).assemble()
