import json

import pytest

@pytest.fixture
def spec_file(tmp_path):
    def _write(chart_type, values, canvas=(512, 512), margin=32, name="spec.json"):
        path = tmp_path / name
        path.write_text(
            json.dumps(
                {
                    "chart_type": chart_type,
                    "series": [[f"s{i}", v] for i, v in enumerate(values)],
                    "canvas": list(canvas),
                    "plot_margin_px": margin,
                }
            )
        )
        return path

    return _write
