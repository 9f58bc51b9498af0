"""Regenerate the olive-oil fixture descriptors in canonical form."""

from fractions import Fraction
from pathlib import Path

from agritrace.config.model import (
    ActivityDef,
    ActorDef,
    CompanyDef,
    EventKindDef,
    KindDef,
    ParamSpec,
    SupplyChainConfig,
)
from agritrace.config.loader import write_config_dir

ACTORS = [
    ActorDef("admin", "Consortium Administrator", "administrator"),
    ActorDef("grower1", "Efisio Sanna", "producer"),
    ActorDef("grower2", "Maria Piras", "producer"),
    ActorDef("miller", "Frantoio Monte Acuto Operator", "transformer"),
    ActorDef("bottler", "Oleificio Ogliastra Operator", "transformer"),
    ActorDef("lab", "LabChem Sardinia", "analysis_lab"),
    ActorDef("cert", "DOP Certification Body", "certification_authority"),
    ActorDef("agronomist", "Dr. Piera Cadeddu", "professional"),
    ActorDef("shop", "Bottega del Gusto", "retailer"),
    ActorDef("wholesale", "Isola Distribuzione", "wholesaler"),
    ActorDef("sensor", "Mill Telemetry Unit", "device"),
]

COMPANIES = [
    CompanyDef(
        "Azienda Agricola Su Niu",
        resource_ids=("olive_grove", "olives"),
        authorized_actor_ids=("grower1", "grower2"),
    ),
    CompanyDef(
        "Frantoio Monte Acuto",
        resource_ids=("oil_mill", "olives", "olive_oil", "pomace"),
        authorized_actor_ids=("miller", "sensor"),
    ),
    CompanyDef(
        "Oleificio Ogliastra",
        resource_ids=("olive_oil", "bottled_oil"),
        authorized_actor_ids=("bottler",),
    ),
]

KINDS = [
    KindDef(
        "olive_grove",
        "R",
        "Olive grove",
        authorized_actor_ids=("grower1", "grower2"),
        description="Grove parcel; size in hectares",
        default_unit="ha",
    ),
    KindDef(
        "oil_mill",
        "R",
        "Oil mill",
        authorized_actor_ids=("miller",),
        description="Milling plant",
        default_unit="t_per_day",
    ),
    KindDef(
        "olives",
        "P",
        "Olives",
        authorized_actor_ids=("grower1", "grower2", "miller", "sensor"),
        default_unit="kg",
    ),
    KindDef(
        "olive_oil",
        "P",
        "Olive oil",
        authorized_actor_ids=("miller", "bottler", "lab", "sensor"),
        default_unit="L",
    ),
    KindDef(
        "pomace",
        "P",
        "Olive pomace",
        authorized_actor_ids=("miller",),
        default_unit="kg",
    ),
    KindDef(
        "bottled_oil",
        "P",
        "Bottled oil",
        authorized_actor_ids=("bottler", "shop"),
        default_unit="L",
    ),
]

EVENTS = [
    EventKindDef(
        id="treatment",
        name="Treatment",
        event_class="D",
        applicable_kind_ids=("olive_grove",),
        authorized_actor_ids=("grower1", "grower2"),
        param_specs=(
            ParamSpec("product", "string"),
            ParamSpec("dose_l_per_ha", "float"),
            ParamSpec("notes", "text"),
        ),
    ),
    EventKindDef(
        id="pruning",
        name="Pruning",
        event_class="D",
        applicable_kind_ids=("olive_grove",),
        authorized_actor_ids=("grower1", "grower2"),
    ),
    EventKindDef(
        id="harvest",
        name="Harvest",
        event_class="T",
        applicable_kind_ids=("olive_grove",),
        authorized_actor_ids=("grower1", "grower2"),
        generated_kind_ids=("olives",),
        param_specs=(
            ParamSpec("kg", "int"),
            ParamSpec("variety", "string"),
            ParamSpec("photo", "hashupload"),
        ),
        max_yield=Fraction(8000),
    ),
    EventKindDef(
        id="milling",
        name="Milling",
        event_class="T",
        applicable_kind_ids=("olives",),
        authorized_actor_ids=("miller",),
        generated_kind_ids=("olive_oil", "pomace"),
        param_specs=(
            ParamSpec("process", "enum", ("cold_extraction", "traditional")),
            ParamSpec("temperature_c", "float"),
            ParamSpec("datasheet", "hashlink"),
        ),
        max_yield=Fraction(1, 5),
    ),
    EventKindDef(
        id="chemical_analysis",
        name="Chemical analysis",
        event_class="D",
        applicable_kind_ids=("olive_oil",),
        authorized_actor_ids=("lab",),
        param_specs=(
            ParamSpec("acidity_pct", "float"),
            ParamSpec("peroxide_value", "float"),
            ParamSpec("report", "hashupload"),
        ),
    ),
    EventKindDef(
        id="bottling",
        name="Bottling",
        event_class="T",
        applicable_kind_ids=("olive_oil",),
        authorized_actor_ids=("bottler",),
        generated_kind_ids=("bottled_oil",),
        param_specs=(
            ParamSpec("lot_code", "string"),
            ParamSpec("bottle_count", "int"),
            ParamSpec("spec_sheet", "link"),
        ),
        max_yield=Fraction(1),
    ),
    EventKindDef(
        id="mill_maintenance",
        name="Mill maintenance",
        event_class="D",
        applicable_kind_ids=("oil_mill",),
        authorized_actor_ids=("miller",),
        param_specs=(
            ParamSpec("notes", "text"),
            ParamSpec("manual", "upload"),
        ),
    ),
    EventKindDef(
        id="storage_conditions",
        name="Storage conditions",
        event_class="D",
        applicable_kind_ids=("olives", "olive_oil"),
        authorized_actor_ids=("miller", "sensor"),
        param_specs=(
            ParamSpec("temp_c", "float"),
            ParamSpec("humidity_pct", "float"),
        ),
    ),
    EventKindDef(
        id="premium_bottling",
        name="Premium bottling",
        event_class="T",
        applicable_kind_ids=("olive_oil",),
        authorized_actor_ids=("bottler",),
        generated_kind_ids=("bottled_oil",),
        param_specs=(ParamSpec("lot_code", "string"),),
        max_yield=Fraction(1),
        required_unlock_actor_ids=("cert",),
    ),
]

ACTIVITIES = [
    ActivityDef("Azienda Agricola Su Niu", ("treatment", "pruning", "harvest")),
    ActivityDef(
        "Frantoio Monte Acuto", ("milling", "mill_maintenance", "storage_conditions")
    ),
    ActivityDef("Frantoio Monte Acuto", ("storage_conditions",), actor_id="sensor"),
    ActivityDef("Oleificio Ogliastra", ("bottling", "premium_bottling"), actor_id="bottler"),
]


def build_config() -> SupplyChainConfig:
    return SupplyChainConfig(
        actors={a.id: a for a in ACTORS},
        companies={c.name: c for c in COMPANIES},
        kinds={k.id: k for k in KINDS},
        event_kinds={e.id: e for e in EVENTS},
        activities=tuple(ACTIVITIES),
        version=1,
    )


if __name__ == "__main__":
    target = Path(__file__).resolve().parent.parent / "fixtures" / "oliveoil"
    write_config_dir(build_config(), target)
    print(f"wrote fixture to {target}")
