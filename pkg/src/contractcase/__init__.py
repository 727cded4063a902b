"""contractcase: from contract-based specification structures to modular assurance cases.

The toolchain parses a small specification DSL, validates it against the
well-formedness rules W1..W9, derives the one-to-one assurance module
architecture, instantiates argument templates, evaluates claim status over
developed cases, and analyzes reuse and change impact across variants.
"""

from .architect import (
    ArchitectureError,
    ArgumentNode,
    ArgumentTemplate,
    AssuranceArchitecture,
    Binding,
    ClaimRef,
    ComponentModule,
    Inference,
    NodeKind,
    RefinementModule,
    claim_id,
    component_module_id,
    derive_architecture,
    instantiate_component_template,
    instantiate_refinement_template,
    refinement_module_id,
)
from .argument import (
    AssuranceCase,
    CaseError,
    ClaimStatus,
    Trace,
    attach_fragment,
    build_case,
    case_from_json,
    case_to_json,
    declare_axiom,
    evaluate_status,
    remove_node,
    status_at_most,
    trace,
)
from .dsl import (
    DslParseError,
    JsonFormatError,
    ParseError,
    SerializeError,
    SourceSpan,
    from_json,
    parse,
    serialize,
    to_json,
)
from .export import (
    RenderError,
    RenderOptions,
    to_dot_architecture,
    to_dot_argument,
    to_dot_specgraph,
    to_report,
)
from .model import (
    Component,
    Concern,
    Contract,
    DependencyKind,
    Edge,
    EdgeKind,
    ModelError,
    MultipleOwnersError,
    Refinement,
    SpecGraph,
    SpecKind,
    Specification,
    SpecificationStructure,
    UnknownIdentifierError,
    UnresolvedReferenceError,
    build_graph,
    content_hash,
    dependency_kind,
    owner_of,
    spec_content_hash,
    structures_equivalent,
)
from .reuse import (
    AssembleResult,
    ImpactReport,
    LibraryError,
    ModuleLibrary,
    Provenance,
    StructureDiff,
    assemble_variant,
    component_module_key,
    concern_modules,
    diff_structures,
    impact,
    refinement_module_key,
)
from .validator import Diagnostic, Severity, validate

__version__ = "0.1.0"
