"""Replayable certificates for the explicit constructions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class WitnessCertificate:
    """Outcome of one construction plus everything needed to re-verify it.

    `payload` is JSON-serializable (matrices and subspace bases as nested
    integer lists); `checks` records each named assertion that was run.
    """

    name: str
    params: dict
    payload: dict
    checks: list = field(default_factory=list)
    verdict: bool = True

    def record(self, check_name: str, ok: bool):
        self.checks.append([check_name, bool(ok)])
        if not ok:
            self.verdict = False
        return ok

    def require(self, check_name: str, ok: bool):
        from ..errors import InputError

        self.record(check_name, ok)
        if not ok:
            raise InputError(f"{self.name}: check failed: {check_name}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "params": self.params,
                "payload": self.payload,
                "checks": self.checks,
                "verdict": self.verdict,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "WitnessCertificate":
        data = json.loads(text)
        return WitnessCertificate(
            name=data["name"],
            params=data["params"],
            payload=data["payload"],
            checks=data["checks"],
            verdict=data["verdict"],
        )


def replay_certificate(cert: WitnessCertificate) -> bool:
    """Re-run the verifier for a serialized certificate.

    Dispatches on the construction name; returns True when the re-run
    reproduces the recorded verdict.
    """
    from . import g2, gamma, witnesses

    name = cert.name
    if name == "sp4":
        fresh = witnesses.sp4_witness(int(cert.params["q"]))
    elif name == "ortho-odd":
        fresh = witnesses.ortho_odd_witness(int(cert.params["n"]), int(cert.params["q"]))
    elif name == "ortho-even-lemma66":
        fresh = witnesses.ortho_even_witness("lemma66", m=int(cert.params["m"]), q=int(cert.params["q"]))
    elif name == "ortho-even-theorem68":
        fresh = witnesses.ortho_even_witness("theorem68", n=int(cert.params["n"]), q=int(cert.params["q"]))
    elif name == "g2":
        fresh = g2.g2_group(int(cert.params["q"])).certificate
    elif name == "soluble-gamma":
        fresh = gamma.soluble_gamma().certificate
    else:
        raise ValueError(f"unknown certificate name {name!r}")
    return fresh.verdict == cert.verdict and fresh.payload == cert.payload
