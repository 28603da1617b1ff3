import asyncio
from typing import Union

from aiohttp import web
from aiohttp_pydantic import PydanticView
from aiohttp_pydantic.oas.typing import r200, r400

from app.weingarten.schemes import ClassifyRequest, VerifyRequest, VerifyResponse
from app.weingarten.services.weingarten import WeingartenService
from app.weingarten.utils.exceptions import WeingartenException


class ClassifyView(PydanticView):
    async def post(self, request: ClassifyRequest) -> Union[r200[dict], r400[dict]]:
        """
        Closed form verdict for a relation and an initial angle, nothing is integrated.
        """
        try:
            verdict = WeingartenService().classify(request)
            return web.json_response(verdict.to_json())
        except WeingartenException as exc:
            return web.json_response({"error": str(exc)}, status=400)


class VerifyView(PydanticView):
    async def post(self, request: VerifyRequest) -> Union[r200[VerifyResponse], r400[dict]]:
        """
        Trace the profile, classify it and reconcile the prediction with the measured features.
        """
        try:
            response_data = await asyncio.to_thread(WeingartenService().verify_response, request)
            return web.json_response(response_data.model_dump(mode="json"))
        except WeingartenException as exc:
            return web.json_response({"error": str(exc)}, status=400)
