"""Client for the benchmark service.

Without a server URL the client invokes the service handlers in-process (same
request/response models, no socket), which keeps one-shot CLI usage and
interrupt/resume semantics simple.  With a URL it speaks HTTP to a remote
service; 4xx errors surface as ValueError with the server's detail message.
"""

import httpx

from .service import schemas as s
from .service import handlers


class ServiceClient:
    def __init__(self, server: str | None = None, timeout: float | None = None):
        self.server = server
        self._http = (
            httpx.Client(base_url=server.rstrip("/"), timeout=timeout)
            if server
            else None
        )

    def _call(self, method, path, payload, response_model, handler):
        if self._http is None:
            return handler(payload) if payload is not None else handler()
        if method == "GET":
            resp = self._http.get(path)
        else:
            resp = self._http.post(path, json=payload.model_dump(mode="json"))
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise ValueError(str(detail))
        data = resp.json()
        if isinstance(response_model, type) and issubclass(response_model, s.BaseModel):
            return response_model.model_validate(data)
        return data

    def health(self) -> s.HealthResponse:
        return self._call("GET", "/health", None, s.HealthResponse, handlers.health)

    def list_datasets(self):
        if self._http is None:
            return handlers.list_datasets()
        data = self._call("GET", "/datasets", None, None, None)
        return [s.DatasetInfoModel.model_validate(d) for d in data]

    def generate(self, req: s.GenerateRequest) -> s.DatasetResponse:
        return self._call("POST", "/datasets/generate", req, s.DatasetResponse,
                          handlers.generate_dataset)

    def embed(self, req: s.EmbedRequest) -> s.EmbedResponse:
        return self._call("POST", "/embeddings/compute", req, s.EmbedResponse,
                          handlers.embed)

    def score(self, req: s.ScoreRequest) -> s.ScoreResponse:
        return self._call("POST", "/metrics/score", req, s.ScoreResponse,
                          handlers.score)

    def search(self, req: s.SearchRequest) -> s.SearchResponse:
        return self._call("POST", "/search/run", req, s.SearchResponse,
                          handlers.search)

    def rank(self, req: s.RankRequest) -> s.RankResponse:
        return self._call("POST", "/rank/compute", req, s.RankResponse,
                          handlers.rank)

    def report(self, req: s.ReportRequest) -> s.ReportResponse:
        return self._call("POST", "/report/emit", req, s.ReportResponse,
                          handlers.report)
