import importlib

from fastapi.testclient import TestClient


def _load_main(monkeypatch):
    monkeypatch.setenv("CENTERKIT_THREADS", "1")
    monkeypatch.setenv("CENTERKIT_LOG_LEVEL", "info")

    import app.config as config

    config.get_settings.cache_clear()
    import app.main as main

    main = importlib.reload(main)
    return main


def _coco() -> dict:
    return {
        "images": [{"id": 1, "width": 100, "height": 100}, {"id": 2, "width": 100, "height": 100}],
        "annotations": [
            {"id": 1, "image_id": 1, "category_id": 1, "bbox": [10, 10, 20, 20]},
            {"id": 2, "image_id": 2, "category_id": 1, "bbox": [50, 50, 40, 40]},
        ],
        "categories": [{"id": 1, "name": "cell"}],
    }


def test_health(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    r0 = client.get("/")
    assert r0.status_code == 200
    assert r0.json() == {"status": "ok"}

    r1 = client.get("/health")
    assert r1.status_code == 200
    assert r1.json() == {"status": "ok"}
    assert main.settings.log_level == "INFO"


def test_score_perfect_predictions(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    payload = {
        "coco": _coco(),
        "points": [
            {"image_id": 1, "category_id": 1, "x": 20, "y": 20, "score": 0.9},
            {"image_id": 2, "category_id": 1, "x": 70, "y": 70, "score": 0.8},
        ],
    }
    r = client.post("/score", json=payload)
    assert r.status_code == 200
    body = r.json()
    assert body["cas"] == 1.0
    assert body["cp"] == 0.0
    assert body["md"] == 0.0
    assert body["f1"] == 1.0
    assert body["units"] == 2
    assert [c["category_id"] for c in body["per_category"]] == [1]


def test_score_config_overrides(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    payload = {
        "coco": _coco(),
        "points": [{"image_id": 1, "category_id": 1, "x": 20, "y": 20, "score": 0.9}],
        "config": {"aggregation": "macro", "band": "small"},
    }
    r = client.post("/score", json=payload)
    assert r.status_code == 200
    body = r.json()
    assert body["aggregation"] == "macro"
    assert body["band"] == "small"
    assert body["cas_s"] == 1.0


def test_score_rejects_bad_config_and_references(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    r = client.post("/score", json={"coco": _coco(), "config": {"lambda": 0, "mu": 0}})
    assert r.status_code == 400
    assert "lambda and mu" in r.json()["detail"]

    r = client.post("/score", json={"coco": _coco(), "config": {"colour": "red"}})
    assert r.status_code == 400
    assert "unknown config key" in r.json()["detail"]

    dangling = {"image_id": 9, "category_id": 1, "x": 1, "y": 1, "score": 0.5}
    r = client.post("/score", json={"coco": _coco(), "points": [dangling]})
    assert r.status_code == 400
    assert "image_id=9" in r.json()["detail"]


def test_invalid_payload(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    r = client.post("/score", json={"points": []})
    assert r.status_code == 400
    assert r.json() == {"detail": "invalid payload"}

    r = client.post("/peaks", content=b"not json", headers={"content-type": "application/json"})
    assert r.status_code == 400
    assert r.json() == {"detail": "invalid payload"}


def test_peaks_from_heatmap(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    grid = [[0.0] * 5 for _ in range(5)]
    grid[1][3] = 0.9
    grid[4][0] = 0.7
    r = client.post("/peaks", json={"heatmap": [grid], "stride": 4, "category_ids": [3], "image_id": 8})
    assert r.status_code == 200
    assert r.json() == [
        {"image_id": 8, "category_id": 3, "x": 14.0, "y": 6.0, "score": 0.8999999761581421},
        {"image_id": 8, "category_id": 3, "x": 2.0, "y": 18.0, "score": 0.699999988079071},
    ]

    r = client.post(
        "/peaks",
        json={"heatmap": [grid], "stride": 4, "category_ids": [3], "config": {"threshold": 0.8}},
    )
    assert [p["score"] for p in r.json()] == [0.8999999761581421]


def test_peaks_rejects_bad_rasters(monkeypatch) -> None:
    main = _load_main(monkeypatch)
    client = TestClient(main.app)

    r = client.post("/peaks", json={"heatmap": [[[0.1, 0.2], [0.3]]], "stride": 4, "category_ids": [1]})
    assert r.status_code == 400

    r = client.post("/peaks", json={"heatmap": [[[1.5]]], "stride": 4, "category_ids": [1]})
    assert r.status_code == 400
    assert "[0, 1]" in r.json()["detail"]

    r = client.post("/peaks", json={"heatmap": [[[0.5]]], "stride": 4, "category_ids": [1, 2]})
    assert r.status_code == 400
