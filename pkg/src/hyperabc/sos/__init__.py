"""SOS programs for augmented barrier certificates and their SDP plumbing."""

from .affine import CONST, AffinePolynomial
from .basis import MonomialBasis
from .certificate import (CertificateUnavailable, GramCheck, SynthesisResult, reconstruct_certificate, synthesize,
                          validate_gram)
from .program import (BasisError, DegreeDeficitError, Equality, GramBlock, SosDegrees, SosProgram,
                      build_sos_program, coefficient_match)
from .sdp import SdpFormatError, SdpProblem, SdpSolution, export_sdpa, import_solution
from .solvers import ENV_VAR, SolverUnavailable, available_backends, resolve_solver, solve_sdp

__all__ = [
    "AffinePolynomial", "BasisError", "CONST", "CertificateUnavailable", "DegreeDeficitError", "ENV_VAR",
    "Equality", "GramBlock", "GramCheck", "MonomialBasis", "SdpFormatError", "SdpProblem", "SdpSolution",
    "SolverUnavailable", "SosDegrees", "SosProgram", "SynthesisResult", "available_backends",
    "build_sos_program", "coefficient_match", "export_sdpa", "import_solution", "reconstruct_certificate",
    "resolve_solver", "solve_sdp", "synthesize", "validate_gram",
]
