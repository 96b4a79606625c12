"""Decision procedures built on rank data: distillability witness, low-rank
separability decision, entanglement-breaking certification, and the
consistency checks for complementary pairs.

Verdicts are tri-valued (yes / no / unknown) because separability testing is
intractable in general and the rank-gap witness is one-sided. A yes or no is
only ever issued when the recorded ranks and spectra force it; everything
else is an honest unknown.

Consistency relations that are mathematically proven are asserted at
runtime; their violation raises CounterexampleOrBugError, which can only
mean numerical failure or an implementation bug. This turns any sampling
harness into a self-test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    ChoiMatrix,
    StinespringOperator,
    channels_equal,
    choi_from_transfer,
    compose,
    is_cocp,
    is_cp,
    is_ppt_map,
    is_trace_preserving,
    transfer_from_choi,
)
from .complement import (
    ComplementaryPair,
    RankChain,
    complementary_pair_from_stinespring,
    rank_chain,
    verify_complementarity,
)
from .errors import (
    CounterexampleOrBugError,
    FragileSampleError,
    NotPositiveSemidefiniteError,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    BipartiteLayout,
    PsdCheck,
    RankDecision,
    ToleranceConfig,
    frobenius,
    is_psd,
    partial_trace,
    partial_transpose,
    psd_check,
    rank_decision,
)

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

# Reason codes. Every yes/no verdict cites one, and each is re-derivable from
# the ranks and spectra recorded alongside it.
RANK_GAP_WITNESS = "rank-gap-witness"
NO_RANK_GAP = "no-rank-gap"
LOW_RANK_PPT_SEPARABLE = "low-rank-ppt-separable"
LOW_RANK_NPT = "low-rank-npt"
OUTSIDE_LOW_RANK_REGIME = "outside-low-rank-regime"
NOT_PPT = "not-ppt"
PSD_SPECTRUM = "psd-spectrum"
PT_SPECTRUM = "pt-spectrum"
TRACE_BLOCK = "trace-block"
DEGRADING_FOUND = "degrading-map-found"
COMPOSITION_INCONSISTENT = "composition-inconsistent"
CANDIDATE_NOT_CP = "candidate-not-cp"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Verdict:
    """Tri-valued outcome with a checkable reason code and a fragility flag."""

    value: str
    reason: str
    fragile: bool = False

    def __post_init__(self):
        if self.value not in (YES, NO, UNKNOWN):
            raise ValueError(f"invalid verdict value {self.value!r}")

    @property
    def is_yes(self) -> bool:
        return self.value == YES

    def to_json(self) -> dict:
        return {"value": self.value, "reason": self.reason, "fragile": self.fragile}


@dataclass
class CertificateReport:
    """Structured outcome of an analysis.

    Every verdict in ``predicates`` is reproducible from ``ranks`` and
    ``spectra`` alone, together with the recorded tolerances.
    """

    tolerances: ToleranceConfig
    predicates: dict[str, Verdict] = field(default_factory=dict)
    ranks: dict[str, RankDecision] = field(default_factory=dict)
    spectra: dict[str, PsdCheck] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    chain: RankChain | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "tolerances": self.tolerances.to_json(),
            "predicates": {k: v.to_json() for k, v in sorted(self.predicates.items())},
            "ranks": {k: v.to_json() for k, v in sorted(self.ranks.items())},
            "spectra": {k: v.to_json() for k, v in sorted(self.spectra.items())},
            "residuals": dict(sorted(self.residuals.items())),
            "rank_chain": self.chain.to_json() if self.chain is not None else None,
            "notes": list(self.notes),
        }


def _bool_verdict(flag: bool, reason: str, fragile: bool = False) -> Verdict:
    return Verdict(YES if flag else NO, reason, fragile)


def _marginal_ranks(
    x: np.ndarray, layout: BipartiteLayout, cfg: ToleranceConfig
) -> tuple[RankDecision, RankDecision, RankDecision]:
    """Rank decisions for (x, left marginal, right marginal).

    The "left marginal" is what remains after tracing out the right factor,
    and vice versa.
    """
    whole = rank_decision(x, cfg)
    left = rank_decision(partial_trace(x, layout, "right"), cfg)
    right = rank_decision(partial_trace(x, layout, "left"), cfg)
    return whole, left, right


def distillability_witness(
    x, layout: BipartiteLayout, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> Verdict:
    """One-sided rank-gap witness for distillability of a PSD bipartite matrix.

    Yes when rank(X) < max(rank of either marginal): such an X is distillable
    and in particular cannot be PPT. A silent witness proves nothing, so the
    alternative is unknown, never no.
    """
    if not is_psd(x, cfg):
        raise NotPositiveSemidefiniteError("distillability witness requires a PSD input")
    whole, left, right = _marginal_ranks(x, layout, cfg)
    fragile = whole.fragile or left.fragile or right.fragile
    if whole.rank < max(left.rank, right.rank):
        return Verdict(YES, RANK_GAP_WITNESS, fragile)
    return Verdict(UNKNOWN, NO_RANK_GAP, fragile)


def separability_decision(
    x, layout: BipartiteLayout, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> Verdict:
    """Exact separability decision in the low-rank regime.

    Applicable when rank(X) <= max(marginal ranks); there separability, PPT,
    and undistillability coincide, so the partial transpose decides. Outside
    the regime the decision is unknown (deciding it is intractable in
    general and deliberately out of scope).
    """
    if not is_psd(x, cfg):
        raise NotPositiveSemidefiniteError("separability decision requires a PSD input")
    whole, left, right = _marginal_ranks(x, layout, cfg)
    fragile = whole.fragile or left.fragile or right.fragile
    if whole.rank > max(left.rank, right.rank):
        return Verdict(UNKNOWN, OUTSIDE_LOW_RANK_REGIME, fragile)
    if is_psd(partial_transpose(x, layout, "left"), cfg):
        return Verdict(YES, LOW_RANK_PPT_SEPARABLE, fragile)
    return Verdict(NO, LOW_RANK_NPT, fragile)


def eb_certificate(choi: ChoiMatrix, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Verdict:
    """Entanglement-breaking certificate for a CP map, via its Choi matrix.

    No whenever the Choi matrix fails PPT (a separable matrix is always PPT).
    Yes only inside the low-rank regime, where PPT and separability coincide.
    Unknown when the map is PPT but the regime does not apply; a yes is never
    claimed without the rank hypothesis on record.
    """
    if not is_psd(choi.matrix, cfg):
        raise NotPositiveSemidefiniteError("eb certificate requires a CP map (PSD Choi matrix)")
    if not is_psd(partial_transpose(choi.matrix, choi.layout, "left"), cfg):
        return Verdict(NO, NOT_PPT)
    return separability_decision(choi.matrix, choi.layout, cfg)


@dataclass(frozen=True)
class DegradingCandidate:
    """Least-squares degrading map candidate with its audit numbers."""

    choi_omega: ChoiMatrix
    verdict: Verdict
    residual: float
    omega_spectrum: PsdCheck


def degrading_candidate(
    pair: ComplementaryPair, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> DegradingCandidate:
    """Solve Omega o Psi = Phi for Omega in the least-squares sense.

    The candidate is the minimum-norm solution through the pseudoinverse of
    Psi's transfer matrix. Yes requires both a tiny composition residual and
    a PSD Choi matrix for Omega. A large residual proves no exact solution
    exists (the least-squares residual is minimal), hence no. A small
    residual with a non-PSD candidate is unknown: a CP solution could exist
    away from the pseudoinverse solution, and searching for it is out of
    scope here.
    """
    s_psi = transfer_from_choi(pair.choi_psi)
    s_phi = transfer_from_choi(pair.choi_phi)
    rcond = cfg.rank_tol * max(s_psi.shape)
    s_omega = s_phi @ np.linalg.pinv(s_psi, rcond=rcond)
    residual = frobenius(s_omega @ s_psi - s_phi)
    scale = frobenius(s_phi)
    choi_omega = choi_from_transfer(s_omega, pair.choi_psi.d_b, pair.choi_phi.d_b)
    spectrum = psd_check(choi_omega.matrix, cfg)
    if residual > cfg.equality_tol * scale:
        verdict = Verdict(NO, COMPOSITION_INCONSISTENT)
    elif spectrum.psd:
        verdict = Verdict(YES, DEGRADING_FOUND)
    else:
        verdict = Verdict(UNKNOWN, CANDIDATE_NOT_CP)
    return DegradingCandidate(choi_omega, verdict, float(residual), spectrum)


def candidate_degrading_map(
    pair: ComplementaryPair, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[ChoiMatrix, Verdict]:
    cand = degrading_candidate(pair, cfg)
    return cand.choi_omega, cand.verdict


def _choi_spectra(choi: ChoiMatrix, cfg: ToleranceConfig) -> tuple[PsdCheck, PsdCheck]:
    direct = psd_check(choi.matrix, cfg)
    transposed = psd_check(partial_transpose(choi.matrix, choi.layout, "left"), cfg)
    return direct, transposed


def equivalence_check(
    st: StinespringOperator,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    context: dict | None = None,
) -> CertificateReport:
    """Full consistency check of a complementary pair built from one dilation.

    Builds the pair and the purification rank chain, evaluates every
    predicate, and, whenever the primary map is PPT, asserts the proven
    consistency relations:

    - the Choi rank of a PPT map is at least both of its marginal ranks;
    - the low-rank regime applies to the complement's Choi matrix, so its
      entanglement-breaking certificate is never unknown;
    - the complement is PPT exactly when it is certified entanglement
      breaking;
    - a firing distillability witness on the complement excludes PPT;
    - the certificate on the primary map itself can never be an outright no;
    - when the primary map's certificate is unknown and the rank chain is
      strict (rank_lc > rank_lb), the witness must fire on the complement.

    The rank-gap witness stays one-sided even here: a silent witness on the
    complement does not certify PPT (there are PPT maps whose complement is
    NPT with no rank gap), so no assertion is made in that direction.

    Violations raise CounterexampleOrBugError. Fragile rank chains abort
    with FragileSampleError instead of risking a spurious counterexample.
    """
    ctx = dict(context or {})
    ctx.setdefault("dims", [st.d_a, st.d_b, st.d_c])

    pair = complementary_pair_from_stinespring(st, cfg)
    chain, decisions = rank_chain(st, cfg)

    report = CertificateReport(tolerances=cfg, chain=chain)
    report.ranks.update({f"l_{key}": dec for key, dec in decisions.items()})

    if not verify_complementarity(pair, cfg):
        raise CounterexampleOrBugError(
            "purification marginals disagree with the basis-assembled Choi matrices", ctx
        )

    phi_psd, phi_pt = _choi_spectra(pair.choi_phi, cfg)
    psi_psd, psi_pt = _choi_spectra(pair.choi_psi, cfg)
    report.spectra.update(
        {"phi_choi": phi_psd, "phi_choi_pt": phi_pt, "psi_choi": psi_psd, "psi_choi_pt": psi_pt}
    )

    phi_ppt = phi_psd.psd and phi_pt.psd
    psi_ppt = psi_psd.psd and psi_pt.psd

    witness_phi = distillability_witness(pair.choi_phi.matrix, pair.choi_phi.layout, cfg)
    witness_psi = distillability_witness(pair.choi_psi.matrix, pair.choi_psi.layout, cfg)
    eb_phi = eb_certificate(pair.choi_phi, cfg)
    eb_psi = eb_certificate(pair.choi_psi, cfg)

    report.predicates.update(
        {
            "cp_phi": _bool_verdict(phi_psd.psd, PSD_SPECTRUM),
            "cp_psi": _bool_verdict(psi_psd.psd, PSD_SPECTRUM),
            "ppt_phi": _bool_verdict(phi_ppt, PT_SPECTRUM),
            "ppt_psi": _bool_verdict(psi_ppt, PT_SPECTRUM),
            "tp_phi": _bool_verdict(is_trace_preserving(pair.choi_phi, cfg), TRACE_BLOCK),
            "tp_psi": _bool_verdict(is_trace_preserving(pair.choi_psi, cfg), TRACE_BLOCK),
            "witness_phi": witness_phi,
            "witness_psi": witness_psi,
            "eb_phi": eb_phi,
            "eb_psi": eb_psi,
        }
    )

    if chain.fragile:
        raise FragileSampleError(
            "rank chain is fragile; equivalence consistency cannot be certified"
        )

    if phi_ppt:
        report.notes.append("primary map is PPT: consistency relations asserted")

        def fail(message: str) -> None:
            raise CounterexampleOrBugError(message, {**ctx, "report": report.to_json()})

        if chain.rank_lab < max(chain.rank_la, chain.rank_lb):
            fail("Choi rank of a PPT map fell below one of its marginal ranks")
        if eb_psi.value == UNKNOWN:
            fail("low-rank regime failed to apply to the complement of a PPT map")
        if psi_ppt != (eb_psi.value == YES):
            fail("PPT and entanglement-breaking certification disagree on the complement")
        if witness_psi.value == YES and psi_ppt:
            fail("distillability witness fired on a PPT Choi matrix")
        if eb_phi.value == NO:
            fail("entanglement-breaking certificate returned no for a PPT map")
        if eb_phi.value == UNKNOWN and chain.rank_lc > chain.rank_lb and witness_psi.value != YES:
            fail("strict rank gap did not trigger the witness on the complement")
    else:
        report.notes.append("primary map is not PPT: consistency branch vacuous")

    return report


def degradable_ppt_check(
    pair: ComplementaryPair,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    context: dict | None = None,
) -> CertificateReport:
    """Degradability-based certification: a PPT map with a CP degrading map
    onto it forces both members of the pair to be entanglement breaking.

    When psi is PPT and the degrading candidate is certified, asserts that
    the composition is PPT and reproduces phi on the Choi level, and that
    both entanglement-breaking certificates come back yes. Violations raise
    CounterexampleOrBugError; fragile rank data downgrades the assertions to
    a note instead.
    """
    ctx = dict(context or {})
    report = CertificateReport(tolerances=cfg)

    psi_psd, psi_pt = _choi_spectra(pair.choi_psi, cfg)
    phi_psd, phi_pt = _choi_spectra(pair.choi_phi, cfg)
    report.spectra.update(
        {"phi_choi": phi_psd, "phi_choi_pt": phi_pt, "psi_choi": psi_psd, "psi_choi_pt": psi_pt}
    )
    psi_ppt = psi_psd.psd and psi_pt.psd
    phi_ppt = phi_psd.psd and phi_pt.psd
    report.predicates["ppt_psi"] = _bool_verdict(psi_ppt, PT_SPECTRUM)
    report.predicates["ppt_phi"] = _bool_verdict(phi_ppt, PT_SPECTRUM)

    if not psi_ppt:
        report.predicates["degradable"] = Verdict(UNKNOWN, NOT_APPLICABLE)
        report.notes.append("psi is not PPT: degradability check vacuous")
        return report

    cand = degrading_candidate(pair, cfg)
    report.predicates["degradable"] = cand.verdict
    report.residuals["degrading_residual"] = cand.residual
    report.spectra["omega_choi"] = cand.omega_spectrum

    eb_phi = eb_certificate(pair.choi_phi, cfg)
    eb_psi = eb_certificate(pair.choi_psi, cfg)
    report.predicates["eb_phi"] = eb_phi
    report.predicates["eb_psi"] = eb_psi

    if cand.verdict.value != YES:
        report.notes.append("no certified degrading map: conclusions not asserted")
        return report

    def fail(message: str) -> None:
        raise CounterexampleOrBugError(message, {**ctx, "report": report.to_json()})

    composed = compose(cand.choi_omega, pair.choi_psi)
    if not channels_equal(composed, pair.choi_phi, cfg):
        fail("certified degrading map does not reproduce phi on the Choi level")
    if not phi_ppt:
        fail("composition of a CP map with a PPT map must be PPT")
    if eb_phi.fragile or eb_psi.fragile:
        report.notes.append("fragile rank data: entanglement-breaking assertions skipped")
        return report
    if eb_phi.value != YES or eb_psi.value != YES:
        fail("degradable PPT pair must certify entanglement breaking on both members")
    report.notes.append("degradable PPT pair: both members certified entanglement breaking")
    return report


def state_report(
    x, layout: BipartiteLayout, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> CertificateReport:
    """Predicate suite for a bipartite matrix treated as an (unnormalized) state."""
    report = CertificateReport(tolerances=cfg)
    spectrum = psd_check(x, cfg)
    pt_spectrum = psd_check(partial_transpose(x, layout, "left"), cfg)
    report.spectra.update({"state": spectrum, "state_pt": pt_spectrum})
    whole, left, right = _marginal_ranks(x, layout, cfg)
    report.ranks.update({"state": whole, "marginal_left": left, "marginal_right": right})
    report.predicates["psd"] = _bool_verdict(spectrum.psd, PSD_SPECTRUM)
    report.predicates["ppt"] = _bool_verdict(spectrum.psd and pt_spectrum.psd, PT_SPECTRUM)
    if spectrum.psd:
        report.predicates["distillable_witness"] = distillability_witness(x, layout, cfg)
        report.predicates["separable"] = separability_decision(x, layout, cfg)
    else:
        report.notes.append("input is not PSD: witness and separability skipped")
    return report


def choi_report(choi: ChoiMatrix, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> CertificateReport:
    """Predicate suite for a map given by its Choi matrix."""
    report = CertificateReport(tolerances=cfg)
    direct, transposed = _choi_spectra(choi, cfg)
    report.spectra.update({"choi": direct, "choi_pt": transposed})
    whole, left, right = _marginal_ranks(choi.matrix, choi.layout, cfg)
    report.ranks.update({"choi": whole, "marginal_a": left, "marginal_b": right})
    cp = is_cp(choi, cfg)
    report.predicates["cp"] = _bool_verdict(cp, PSD_SPECTRUM)
    report.predicates["cocp"] = _bool_verdict(is_cocp(choi, cfg), PT_SPECTRUM)
    report.predicates["ppt"] = _bool_verdict(is_ppt_map(choi, cfg), PT_SPECTRUM)
    report.predicates["trace_preserving"] = _bool_verdict(is_trace_preserving(choi, cfg), TRACE_BLOCK)
    if cp:
        report.predicates["eb"] = eb_certificate(choi, cfg)
    else:
        report.notes.append("map is not CP: entanglement-breaking certificate skipped")
    return report
