"""Per-user template files under one directory."""

from __future__ import annotations

import re
from pathlib import Path
from typing import List

from .errors import InvalidUserId, UnknownUser, UserExists
from .template import MinutiaeTemplate, read_template, write_template

USER_ID = re.compile(r"[A-Za-z0-9_-]{1,64}")
SUFFIX = ".tpl"


def check_user_id(user_id: str) -> str:
    if not isinstance(user_id, str) or not USER_ID.fullmatch(user_id):
        raise InvalidUserId(f"user id must match [A-Za-z0-9_-]{{1,64}}, got {user_id!r}")
    return user_id


class TemplateStore:
    """One ``<user_id>.tpl`` file per enrolled user."""

    def __init__(self, root) -> None:
        self.root = Path(root)

    def path_for(self, user_id: str) -> Path:
        return self.root / (check_user_id(user_id) + SUFFIX)

    def __contains__(self, user_id: str) -> bool:
        return self.path_for(user_id).is_file()

    def users(self) -> List[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.stem for p in self.root.glob("*" + SUFFIX) if USER_ID.fullmatch(p.stem))

    def save(self, template: MinutiaeTemplate, overwrite: bool = False) -> Path:
        path = self.path_for(template.user_id)
        if path.exists() and not overwrite:
            raise UserExists(f"user {template.user_id!r} is already enrolled")
        self.root.mkdir(parents=True, exist_ok=True)
        write_template(template, path)
        return path

    def load(self, user_id: str) -> MinutiaeTemplate:
        path = self.path_for(user_id)
        if not path.is_file():
            raise UnknownUser(f"user {user_id!r} is not enrolled")
        return read_template(path)
