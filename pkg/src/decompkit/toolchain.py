"""Compiler configuration and resource-limited subprocess execution."""
from __future__ import annotations

import functools
import os
import resource
import shutil
import signal
import subprocess
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from decompkit.errors import ToolchainMissing

ENV_CC = "DECOMPKIT_CC"
ENV_NO_NETNS = "DECOMPKIT_NO_NETNS"

# Newer compilers promote these to hard errors; keep the verdict stable across versions.
DEFAULT_CFLAGS = (
    "-std=gnu11", "-O0", "-w",
    "-Wno-error=int-conversion",
    "-Wno-error=incompatible-pointer-types",
    "-Wno-error=implicit-function-declaration",
    "-Wno-error=implicit-int",
)


@dataclass(frozen=True)
class CompilerConfig:
    cc: str = field(default_factory=lambda: os.environ.get(ENV_CC, "gcc"))
    cflags: tuple = DEFAULT_CFLAGS
    ldflags: tuple = ("-lm",)
    timeout: float = 10.0
    memory_limit: int = 1 << 30

    def resolve(self) -> str:
        path = shutil.which(self.cc)
        if path is None:
            raise ToolchainMissing(f"C compiler {self.cc!r} not found on PATH")
        return path

    @property
    def compiler_id(self) -> str:
        return compiler_id(self.resolve())

    def describe(self) -> dict:
        return {"cc": self.cc, "compiler_id": self.compiler_id, "cflags": list(self.cflags),
                "timeout": self.timeout}


@functools.lru_cache(maxsize=None)
def compiler_id(path: str) -> str:
    try:
        out = subprocess.run([path, "--version"], capture_output=True, text=True, timeout=10)
        first = out.stdout.splitlines()[0] if out.stdout else os.path.basename(path)
    except (OSError, subprocess.SubprocessError):
        first = os.path.basename(path)
    return first.strip()


@dataclass
class RunResult:
    returncode: int
    stdout: bytes
    stderr: bytes
    timed_out: bool
    duration_ms: float


def _limits(cpu_seconds: Optional[int], memory: Optional[int]):
    def apply():
        if cpu_seconds:
            resource.setrlimit(resource.RLIMIT_CPU, (cpu_seconds, cpu_seconds + 1))
        if memory:
            resource.setrlimit(resource.RLIMIT_AS, (memory, memory))
        resource.setrlimit(resource.RLIMIT_FSIZE, (64 << 20, 64 << 20))
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))
    return apply


def run_limited(cmd: Sequence[str], cwd: str, timeout: float,
                memory: Optional[int] = None, cpu_seconds: Optional[int] = None,
                env: Optional[dict] = None) -> RunResult:
    """Run ``cmd`` in its own process group; kill the whole group on timeout."""
    t0 = time.monotonic()
    proc = subprocess.Popen(
        list(cmd), cwd=cwd, stdin=subprocess.DEVNULL, stdout=subprocess.PIPE,
        stderr=subprocess.PIPE, start_new_session=True,
        preexec_fn=_limits(cpu_seconds, memory), env=env,
    )
    try:
        out, err = proc.communicate(timeout=timeout)
        timed_out = False
    except subprocess.TimeoutExpired:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, err = proc.communicate()
        timed_out = True
    return RunResult(proc.returncode, out, err, timed_out, (time.monotonic() - t0) * 1000.0)


def sandbox_env() -> dict:
    """Minimal environment for running untrusted binaries."""
    return {"PATH": "/usr/bin:/bin", "LC_ALL": "C"}


@functools.lru_cache(maxsize=None)
def network_isolation() -> tuple:
    """Command prefix that runs a program in an empty network namespace.

    Empty when unprivileged namespaces are unavailable or disabled through
    ``DECOMPKIT_NO_NETNS``; callers then run with rlimits only.
    """
    if os.environ.get(ENV_NO_NETNS):
        return ()
    tool = shutil.which("unshare")
    if tool is None:
        return ()
    try:
        probe = subprocess.run([tool, "-rn", "true"], capture_output=True, timeout=10)
    except (OSError, subprocess.SubprocessError):
        return ()
    return (tool, "-rn") if probe.returncode == 0 else ()
