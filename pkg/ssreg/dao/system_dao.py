"""
系统数据访问对象

JSON 文档: 维数字段加行优先的矩阵数组
"""

import json
from pathlib import Path
from typing import Any, Dict

from ..core.exceptions import ConfigException, ErrorCodes, SsregException
from ..lti import LtiSystem


class SystemDAO:
    """被控对象 JSON 读写"""

    @staticmethod
    def to_dict(sys: LtiSystem) -> Dict[str, Any]:
        return {
            "n": sys.n,
            "m": sys.m,
            "p": sys.p,
            "r": sys.r,
            "A": sys.A.tolist(),
            "B": sys.B.tolist(),
            "C": sys.C.tolist(),
            "E": sys.E.tolist(),
        }

    @staticmethod
    def from_dict(payload: Dict[str, Any]) -> LtiSystem:
        missing = [key for key in ("A", "B", "C", "E") if key not in payload]
        if missing:
            raise SsregException(f"系统文档缺少矩阵: {', '.join(missing)}", ErrorCodes.INVALID_FILE, exit_code=2)
        sys = LtiSystem(A=payload["A"], B=payload["B"], C=payload["C"], E=payload["E"])
        declared = {key: payload[key] for key in ("n", "m", "p", "r") if key in payload}
        actual = {"n": sys.n, "m": sys.m, "p": sys.p, "r": sys.r}
        mismatched = {key: (value, actual[key]) for key, value in declared.items() if value != actual[key]}
        if mismatched:
            raise SsregException("系统文档的维数字段与矩阵不一致", ErrorCodes.INVALID_FILE,
                                 {"mismatched": mismatched}, exit_code=2)
        return sys

    @staticmethod
    def save(sys: LtiSystem, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(SystemDAO.to_dict(sys), indent=2) + "\n", encoding="utf-8")
        return path

    @staticmethod
    def load(path) -> LtiSystem:
        path = Path(path)
        if not path.exists():
            raise ConfigException(f"系统文件不存在: {path}", {"path": str(path)})
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise SsregException(f"系统文件不是合法 JSON: {e}", ErrorCodes.INVALID_FILE, {"path": str(path)}, exit_code=2)
        return SystemDAO.from_dict(payload)
