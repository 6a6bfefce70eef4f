"""Local JSON API over a single session, consumed by the explorer UI.

One network per process, loopback by default, no auth.  Mutations are
serialized by the session's lock; reads work off immutable snapshots.  Every
response carries the session revision so clients can reject stale views.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .errors import SkmodError, TreeError
from .graphs import chemical_separated, fraternize, is_separated, moralize
from .modular import CopyMove
from .parse import network_to_json_dict
from .session import Session
from .simulate import replica_statistics

_CONTENT_TYPES = {
    ".html": "text/html",
    ".js": "text/javascript",
    ".mjs": "text/javascript",
    ".css": "text/css",
    ".svg": "image/svg+xml",
    ".json": "application/json",
    ".ico": "image/x-icon",
}


def make_server(
    session: Session, host: str = "127.0.0.1", port: int = 0, ui_dir: Optional[str] = None
) -> ThreadingHTTPServer:
    ui_path = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # quiet by default
            pass

        # -- plumbing -----------------------------------------------------

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def _ok(self, payload: dict) -> None:
            self._send(200, {"revision": session.revision, **payload})

        def _error(self, status: int, message: str) -> None:
            self._send(status, {"revision": session.revision, "error": message})

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            return json.loads(self.rfile.read(length))

        def _serve_static(self, path: str) -> bool:
            if ui_path is None:
                return False
            rel = "index.html" if path in ("", "/") else path.lstrip("/")
            target = (ui_path / rel).resolve()
            if not target.is_relative_to(ui_path) or not target.is_file():
                return False
            body = target.read_bytes()
            self.send_response(200)
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return True

        def do_OPTIONS(self):
            self._send(204, {})

        # -- reads ----------------------------------------------------------

        def do_GET(self):
            url = urlparse(self.path)
            query = {k: v[0] for k, v in parse_qs(url.query).items()}
            try:
                if url.path == "/network":
                    self._ok({"network": network_to_json_dict(session.net)})
                elif url.path == "/kig":
                    variant = query.get("variant", "directed")
                    if variant == "directed":
                        g = session.kig.to_json_dict()
                    elif variant == "undirected":
                        g = session.g_undirected.to_json_dict()
                    elif variant == "moral":
                        g = moralize(session.kig).to_json_dict()
                    elif variant == "fraternized":
                        g = fraternize(session.net, session.kig).to_json_dict()
                    else:
                        return self._error(400, f"unknown variant {variant!r}")
                    self._ok({"variant": variant, "graph": g})
                elif url.path == "/tree":
                    self._ok({"tree": session.tree_json(), "can_undo": session.can_undo()})
                elif url.path == "/modularization":
                    self._ok({"modularization": session.modularization_json()})
                elif url.path == "/report":
                    self._ok({"report": session.snapshot.report.to_json_dict()})
                elif url.path == "/separation":
                    a = [s for s in query.get("a", "").split(",") if s]
                    b = [s for s in query.get("b", "").split(",") if s]
                    d = [s for s in query.get("d", "").split(",") if s]
                    if not a or not b:
                        return self._error(400, "parameters a and b are required")
                    graphical = is_separated(session.g_undirected, a, b, d)
                    chemical = chemical_separated(session.net, a, b, d)
                    self._ok({"graphical": graphical, "chemical": chemical,
                              "agree": graphical == chemical})
                elif self._serve_static(url.path):
                    return
                else:
                    self._error(404, f"unknown path {url.path}")
            except SkmodError as exc:
                self._error(422, str(exc))
            except Exception as exc:  # pragma: no cover - defensive
                self._error(500, f"internal error: {exc}")

        # -- mutations ---------------------------------------------------------

        def do_POST(self):
            url = urlparse(self.path)
            try:
                body = self._body()
            except (ValueError, json.JSONDecodeError):
                return self._error(400, "request body is not valid JSON")
            try:
                if url.path == "/aggregate":
                    if "i" not in body or "j" not in body:
                        return self._error(400, "body must carry cluster ids i and j")
                    session.aggregate(int(body["i"]), int(body["j"]))
                    self._ok(self._tree_payload())
                elif url.path == "/undo":
                    session.undo()
                    self._ok(self._tree_payload())
                elif url.path == "/copy":
                    moves = [
                        CopyMove(mv["species"], int(mv["from"]), int(mv["to"]))
                        for mv in body.get("moves", [])
                    ]
                    if not moves:
                        return self._error(400, "body must carry a nonempty moves list")
                    session.copy_species(moves)
                    self._ok(self._tree_payload())
                elif url.path == "/reset":
                    session.reset(body.get("mode", "cliques"))
                    self._ok(self._tree_payload())
                elif url.path == "/simulate":
                    stats = replica_statistics(
                        session.net,
                        [int(v) for v in body["x0"]],
                        float(body["t_end"]),
                        int(body.get("replicas", 1)),
                        int(body.get("seed", 0)),
                    )
                    self._ok({"stats": stats})
                else:
                    self._error(404, f"unknown path {url.path}")
            except (TreeError,) as exc:
                self._error(422, str(exc))
            except (KeyError, ValueError, TypeError) as exc:
                self._error(400, f"bad request: {exc}")
            except SkmodError as exc:
                self._error(422, str(exc))
            except Exception as exc:  # pragma: no cover - defensive
                self._error(500, f"internal error: {exc}")

        def _tree_payload(self) -> dict:
            return {
                "tree": session.tree_json(),
                "modularization": session.modularization_json(),
                "report": session.snapshot.report.to_json_dict(),
                "can_undo": session.can_undo(),
            }

    return ThreadingHTTPServer((host, port), Handler)
