"""The field-invariant translator.

Derives the assurance module architecture from a validated structure (one
component module per component that carries contracts, one refinement
module per refinement, bindings wired from premises toward conclusions)
and instantiates the skeleton argument templates for both module kinds.

Nothing here invents argument content: strategies and justifications are
emitted as undeveloped placeholders for subject-matter experts to fill in.

Naming scheme (stable public API):

  component module   M_<component id>
  refinement module  R_<refinement id>
  interface claim    <module id>__<specification id>
  strategy node      <module id>__S__<contract id>   (component modules)
                     <module id>__S                  (refinement modules)
  justification      same pattern with J; context nodes use CTX
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import Component, SpecificationStructure, owner_of
from .validator import Diagnostic, Severity, validate

PLACEHOLDER_TEXT = "To be developed"


class ArchitectureError(Exception):
    """Architecture derivation refused; carries the blocking diagnostics."""

    def __init__(self, message: str, diagnostics: list[Diagnostic] | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class NodeKind(Enum):
    CLAIM = "claim"
    STRATEGY = "strategy"
    JUSTIFICATION = "justification"
    CONTEXT = "context"
    EVIDENCE = "evidence"


@dataclass(frozen=True)
class ArgumentNode:
    """One node of an argument: claim, strategy, justification, context, or evidence.

    ``developed`` is False for template placeholders awaiting field-dependent
    content. Evidence nodes carry an artifact reference, a trust flag set by
    the user, and the claim they support.
    """

    id: str
    kind: NodeKind
    text: str
    module: str
    developed: bool = True
    artifact: str = ""
    trusted: bool = False
    supports: str | None = None

    def __post_init__(self) -> None:
        if self.kind is NodeKind.EVIDENCE:
            if not self.artifact:
                raise ValueError(f"evidence {self.id} must carry an artifact reference")
            if not self.supports:
                raise ValueError(f"evidence {self.id} must name the claim it supports")
        elif self.artifact or self.supports:
            raise ValueError(f"node {self.id}: only evidence carries artifact/supports")


@dataclass(frozen=True)
class Inference:
    """A reasoning step deriving ``conclusion`` from ``premises`` via ``strategy``.

    The justification records why the strategy is valid in context; without
    one the conclusion's validity stays undefined.
    """

    strategy: str
    premises: tuple[str, ...]
    conclusion: str
    justification: str | None = None
    contexts: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        if self.conclusion in self.premises:
            raise ValueError(f"inference concluding {self.conclusion} lists it as a premise")


@dataclass(frozen=True)
class ClaimRef:
    """An interface claim and the specification it restates."""

    claim: str
    spec: str


@dataclass(frozen=True)
class ComponentModule:
    id: str
    component: str
    contracts: tuple[str, ...]
    interface_premises: tuple[ClaimRef, ...]
    interface_conclusions: tuple[ClaimRef, ...]


@dataclass(frozen=True)
class RefinementModule:
    id: str
    refinement: str
    premise_spec: str
    conclusion_spec: str

    @property
    def premise_claim(self) -> str:
        return claim_id(self.id, self.premise_spec)

    @property
    def conclusion_claim(self) -> str:
        return claim_id(self.id, self.conclusion_spec)


@dataclass(frozen=True)
class Binding:
    """A cross-module link, directed from premises toward the conclusion."""

    from_module: str
    from_claim: str
    to_module: str
    to_claim: str


@dataclass(frozen=True)
class AssuranceArchitecture:
    component_modules: tuple[ComponentModule, ...]
    refinement_modules: tuple[RefinementModule, ...]
    bindings: tuple[Binding, ...]

    def module_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.component_modules) + tuple(
            m.id for m in self.refinement_modules
        )

    def find(self, module_id: str) -> ComponentModule | RefinementModule:
        for module in self.component_modules + self.refinement_modules:
            if module.id == module_id:
                return module
        raise KeyError(f"unknown module '{module_id}'")


@dataclass(frozen=True)
class ArgumentTemplate:
    """Skeleton argumentation for one module.

    Claims listed in ``interface_premises``/``interface_conclusions`` sit on
    the module's scope lines; every other node is internal, in the region
    field-dependent argumentation must fill.
    """

    module_id: str
    nodes: tuple[ArgumentNode, ...]
    inferences: tuple[Inference, ...]
    interface_premises: tuple[str, ...]
    interface_conclusions: tuple[str, ...]

    def scope_of(self, node_id: str) -> str:
        if node_id in self.interface_premises:
            return "premise"
        if node_id in self.interface_conclusions:
            return "conclusion"
        return "internal"


def claim_id(module_id: str, spec_id: str) -> str:
    return f"{module_id}__{spec_id}"


def component_module_id(component_id: str) -> str:
    return f"M_{component_id}"


def refinement_module_id(refinement_id: str) -> str:
    return f"R_{refinement_id}"


def derive_architecture(
    structure: SpecificationStructure, mode: str = "strict"
) -> AssuranceArchitecture:
    """Map the structure one-to-one onto an assurance module architecture.

    One component module per component holding at least one contract, one
    refinement module per refinement, and two bindings per refinement: from
    the source claim in its owner's module into the refinement module, and
    from the refinement module's conclusion to the target's premise claim.
    Refused outright if validation (at ``mode``) reports any error.
    """
    diagnostics = validate(structure, mode)
    errors = [d for d in diagnostics if d.severity is Severity.ERROR]
    if errors:
        listed = "; ".join(d.render() for d in errors)
        raise ArchitectureError(f"structure is not well-formed: {listed}", errors)

    component_modules: list[ComponentModule] = []
    for comp in structure.preorder():
        contracts = sorted(structure.contracts_of(comp.id), key=lambda k: k.id)
        if not contracts:
            continue
        module_id = component_module_id(comp.id)
        premises = tuple(
            ClaimRef(claim_id(module_id, spec.id), spec.id)
            for contract in contracts
            for spec in contract.assumptions
        )
        conclusions = tuple(
            ClaimRef(claim_id(module_id, contract.guarantee.id), contract.guarantee.id)
            for contract in contracts
        )
        component_modules.append(
            ComponentModule(
                id=module_id,
                component=comp.id,
                contracts=tuple(k.id for k in contracts),
                interface_premises=premises,
                interface_conclusions=conclusions,
            )
        )

    refinement_modules = tuple(
        RefinementModule(
            id=refinement_module_id(r.id),
            refinement=r.id,
            premise_spec=r.source,
            conclusion_spec=r.target,
        )
        for r in sorted(structure.refinements, key=lambda r: r.id)
    )

    bindings: list[Binding] = []
    for module in refinement_modules:
        ref = structure.refinement_map()[module.refinement]
        _, source_owner = owner_of(structure, ref.source)
        _, target_owner = owner_of(structure, ref.target)
        source_module = component_module_id(source_owner)
        target_module = component_module_id(target_owner)
        bindings.append(
            Binding(
                from_module=source_module,
                from_claim=claim_id(source_module, ref.source),
                to_module=module.id,
                to_claim=module.premise_claim,
            )
        )
        bindings.append(
            Binding(
                from_module=module.id,
                from_claim=module.conclusion_claim,
                to_module=target_module,
                to_claim=claim_id(target_module, ref.target),
            )
        )

    return AssuranceArchitecture(
        component_modules=tuple(component_modules),
        refinement_modules=refinement_modules,
        bindings=tuple(bindings),
    )


def _context_text(component: Component) -> str:
    if component.description:
        return f"Component {component.display_name}: {component.description}"
    return f"Component {component.display_name}"


def instantiate_component_template(
    architecture: AssuranceArchitecture,
    module: ComponentModule,
    structure: SpecificationStructure,
) -> ArgumentTemplate:
    """Skeleton argument for a component module: one disjoint instance per contract.

    Each instance restates the contract's assumptions as interface premise
    claims and its guarantee as the interface conclusion claim, wired
    through an undeveloped strategy/justification pair under a context node
    that references the component description. A contract without
    assumptions still gets the full placeholder pair: evidence must be
    argued even when nothing is assumed.
    """
    if module.id not in {m.id for m in architecture.component_modules}:
        raise ArchitectureError(f"module {module.id} does not belong to this architecture")
    component = structure.component_map()[module.component]
    contract_map = structure.contract_map()
    nodes: list[ArgumentNode] = []
    inferences: list[Inference] = []
    for contract_id in module.contracts:
        contract = contract_map[contract_id]
        conclusion = claim_id(module.id, contract.guarantee.id)
        nodes.append(ArgumentNode(conclusion, NodeKind.CLAIM, contract.guarantee.text, module.id))
        premises: list[str] = []
        for assumption in contract.assumptions:
            premise = claim_id(module.id, assumption.id)
            premises.append(premise)
            nodes.append(ArgumentNode(premise, NodeKind.CLAIM, assumption.text, module.id))
        strategy = f"{module.id}__S__{contract_id}"
        justification = f"{module.id}__J__{contract_id}"
        context = f"{module.id}__CTX__{contract_id}"
        nodes.append(ArgumentNode(strategy, NodeKind.STRATEGY, PLACEHOLDER_TEXT, module.id,
                                  developed=False))
        nodes.append(ArgumentNode(justification, NodeKind.JUSTIFICATION, PLACEHOLDER_TEXT,
                                  module.id, developed=False))
        nodes.append(ArgumentNode(context, NodeKind.CONTEXT, _context_text(component), module.id))
        inferences.append(
            Inference(
                strategy=strategy,
                premises=tuple(premises),
                conclusion=conclusion,
                justification=justification,
                contexts=(context,),
            )
        )
    return ArgumentTemplate(
        module_id=module.id,
        nodes=tuple(nodes),
        inferences=tuple(inferences),
        interface_premises=tuple(ref.claim for ref in module.interface_premises),
        interface_conclusions=tuple(ref.claim for ref in module.interface_conclusions),
    )


def instantiate_refinement_template(
    architecture: AssuranceArchitecture,
    module: RefinementModule,
    structure: SpecificationStructure,
) -> ArgumentTemplate:
    """Skeleton argument for a refinement module.

    Exactly one premise claim (the source specification), one conclusion
    claim (the target assumption), and one undeveloped strategy and
    justification: the argument that the source entails the target is
    field-dependent and left to experts.
    """
    if module.id not in {m.id for m in architecture.refinement_modules}:
        raise ArchitectureError(f"module {module.id} does not belong to this architecture")
    specs = structure.specifications()
    premise = module.premise_claim
    conclusion = module.conclusion_claim
    strategy = f"{module.id}__S"
    justification = f"{module.id}__J"
    nodes = (
        ArgumentNode(premise, NodeKind.CLAIM, specs[module.premise_spec].text, module.id),
        ArgumentNode(conclusion, NodeKind.CLAIM, specs[module.conclusion_spec].text, module.id),
        ArgumentNode(strategy, NodeKind.STRATEGY, PLACEHOLDER_TEXT, module.id, developed=False),
        ArgumentNode(justification, NodeKind.JUSTIFICATION, PLACEHOLDER_TEXT, module.id,
                     developed=False),
    )
    inference = Inference(
        strategy=strategy,
        premises=(premise,),
        conclusion=conclusion,
        justification=justification,
    )
    return ArgumentTemplate(
        module_id=module.id,
        nodes=nodes,
        inferences=(inference,),
        interface_premises=(premise,),
        interface_conclusions=(conclusion,),
    )
